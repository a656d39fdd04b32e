#include <csignal>
#include <iostream>

#include "cli.hpp"

namespace {

extern "C" void on_signal(int) { proxiclass::cli::request_shutdown(); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  return proxiclass::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
