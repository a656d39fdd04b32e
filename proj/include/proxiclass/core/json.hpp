#pragma once

// Canonical JSON shapes for the domain types. Field names follow the struct
// members; timestamps are RFC 3339 strings. Decoding errors surface as
// nlohmann::json exceptions or std::invalid_argument.

#include <json.hpp>

#include "proxiclass/core/domain.hpp"

namespace proxiclass {

using json = nlohmann::json;

void to_json(json& j, const Udid& u);
void from_json(const json& j, Udid& u);

void to_json(json& j, const Student& s);
void from_json(const json& j, Student& s);

void to_json(json& j, const Teacher& t);
void from_json(const json& j, Teacher& t);

void to_json(json& j, const BehaviorCategory& c);
void from_json(const json& j, BehaviorCategory& c);

void to_json(json& j, const BehaviorTaxonomy& t);
BehaviorTaxonomy taxonomy_from_json(const json& j);

void to_json(json& j, const Lesson& l);
void from_json(const json& j, Lesson& l);

void to_json(json& j, const BehaviorRecord& r);
void from_json(const json& j, BehaviorRecord& r);

json timestamp_to_json(Timestamp ts);
Timestamp timestamp_from_json(const json& j);

}  // namespace proxiclass
