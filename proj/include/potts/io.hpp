#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "potts/function_classes.hpp"
#include "potts/model.hpp"
#include "potts/sampler.hpp"
#include "potts/verifier.hpp"

namespace potts::io {

using nlohmann::json;

// {"q": int, "vertices": [string], "edges": [{"u", "v", "J"}], "fields": {vertex: number}}
PottsModel parse_model(const json& doc);
PottsModel load_model(const std::filesystem::path& path);
json model_to_json(const PottsModel& model);

// {"kind": "A"|"B"|"C"|"table", "q": int, "values": [[re, im], ...]}
SpinFunction parse_function(const json& doc);
json function_to_json(const SpinFunction& f);

// Command-line function argument: "A", "familyA", "B", "familyB", an
// inline JSON object, an inline array of values (numbers or [re, im]), or a
// path to a JSON function file. `q` is used for
// the family shorthands.
SpinFunction resolve_function(std::string_view arg, int q);

// Comma-separated vertex names; the empty string is the empty region.
Region parse_region(const PottsModel& model, std::string_view list);

json to_json(const VerificationReport& report);
json to_json(const MembershipReport& report);
json to_json(const Estimate& estimate);
json complex_to_json(Complex z);

json read_json_file(const std::filesystem::path& path);

}  // namespace potts::io
