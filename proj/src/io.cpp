#include "potts/io.hpp"

#include <fstream>
#include <sstream>

#include "potts/error.hpp"

namespace potts::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::BadInput, what); }

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) bad(std::string("missing key '") + key + "'");
  return doc.at(key);
}

double number(const json& value, const char* what) {
  if (!value.is_number()) bad(std::string(what) + " must be a number");
  return value.get<double>();
}

Complex parse_complex(const json& value) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  bad("function values must be numbers or [re, im] pairs");
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

PottsModel parse_model(const json& doc) {
  PottsModel model;
  const json& q = require(doc, "q");
  if (!q.is_number_integer()) bad("'q' must be an integer");
  model.q = q.get<int>();

  const json& vertices = require(doc, "vertices");
  if (!vertices.is_array()) bad("'vertices' must be an array");
  for (const auto& v : vertices) {
    if (!v.is_string()) bad("vertex ids must be strings");
    model.vertices.push_back(v.get<std::string>());
  }
  model.fields.assign(model.vertices.size(), 0.0);

  if (doc.contains("edges")) {
    const json& edges = doc.at("edges");
    if (!edges.is_array()) bad("'edges' must be an array");
    for (const auto& e : edges) {
      const json& u = require(e, "u");
      const json& v = require(e, "v");
      if (!u.is_string() || !v.is_string()) bad("edge endpoints must be vertex ids");
      const auto ui = model.find_vertex(u.get<std::string>());
      const auto vi = model.find_vertex(v.get<std::string>());
      if (!ui || !vi) throw Error(ErrorCode::BadEdge, "edge endpoint is not a listed vertex");
      model.edges.push_back({*ui, *vi, number(require(e, "J"), "'J'")});
    }
  }
  if (doc.contains("fields")) {
    const json& fields = doc.at("fields");
    if (!fields.is_object()) bad("'fields' must be an object keyed by vertex id");
    for (const auto& [name, h] : fields.items()) {
      const auto vi = model.find_vertex(name);
      if (!vi) bad("field given for unknown vertex '" + name + "'");
      model.fields[*vi] = number(h, "field");
    }
  }
  validate_model(model);
  return model;
}

PottsModel load_model(const std::filesystem::path& path) { return parse_model(read_json_file(path)); }

json model_to_json(const PottsModel& model) {
  json doc;
  doc["q"] = model.q;
  doc["vertices"] = model.vertices;
  doc["edges"] = json::array();
  for (const auto& e : model.edges) {
    doc["edges"].push_back({{"u", model.vertices[e.u]}, {"v", model.vertices[e.v]}, {"J", e.coupling}});
  }
  doc["fields"] = json::object();
  for (std::size_t v = 0; v < model.num_vertices(); ++v) doc["fields"][model.vertices[v]] = model.fields[v];
  return doc;
}

SpinFunction parse_function(const json& doc) {
  const json& kind = require(doc, "kind");
  const json& q = require(doc, "q");
  if (!kind.is_string()) bad("'kind' must be a string");
  if (!q.is_number_integer()) bad("'q' must be an integer");
  const auto k = kind.get<std::string>();
  const int qv = q.get<int>();
  if (qv < 2) throw Error(ErrorCode::BadQ, "q must be at least 2");

  std::vector<Complex> values;
  if (doc.contains("values")) {
    const json& vals = doc.at("values");
    if (!vals.is_array()) bad("'values' must be an array");
    for (const auto& v : vals) values.push_back(parse_complex(v));
  }
  if (k == "A") return make_family(Family::A, qv);
  if (k == "B") return make_family(Family::B, qv);
  if (k == "C") {
    if (!doc.contains("values")) bad("family C needs 'values'");
    return make_family(Family::C, qv, values);
  }
  if (k == "table") {
    if (!doc.contains("values")) bad("a table function needs 'values'");
    if (values.size() != static_cast<std::size_t>(qv)) bad("'values' must have q entries");
    return SpinFunction(std::move(values));
  }
  bad("unknown function kind '" + k + "'");
}

json function_to_json(const SpinFunction& f) {
  json values = json::array();
  for (const auto& z : f.values()) values.push_back({z.real(), z.imag()});
  return {{"kind", "table"}, {"q", f.q()}, {"values", values}};
}

SpinFunction resolve_function(std::string_view arg, int q) {
  if (arg == "A" || arg == "familyA") return make_family(Family::A, q);
  if (arg == "B" || arg == "familyB") return make_family(Family::B, q);
  json doc;
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    try {
      doc = json::parse(arg);
    } catch (const json::exception& e) {
      bad(std::string("malformed inline function spec: ") + e.what());
    }
  } else {
    doc = read_json_file(std::filesystem::path(std::string(arg)));
  }
  // A bare array is a value table.
  if (doc.is_array()) doc = json{{"kind", "table"}, {"q", doc.size()}, {"values", doc}};
  SpinFunction f = parse_function(doc);
  if (f.q() != q) bad("function has q=" + std::to_string(f.q()) + " but the model has q=" + std::to_string(q));
  return f;
}

Region parse_region(const PottsModel& model, std::string_view list) {
  std::vector<std::string> names;
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  return Region::from_names(model, names);
}

json complex_to_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const VerificationReport& r) {
  return {{"type", "check"},     {"claim", r.claim},   {"digest", r.digest},
          {"lhs", r.lhs},        {"rhs", r.rhs},       {"margin", r.margin},
          {"imag_residual", r.imag_residual},          {"tolerance", r.tolerance},
          {"verdict", r.pass ? "pass" : "fail"}};
}

json to_json(const MembershipReport& r) {
  json doc = {{"type", "membership"},
              {"in_Fq", r.in_Fq},
              {"M", r.max_exponent},
              {"tolerance", r.tolerance}};
  doc["in_Fq_i"] = r.in_Fq_i ? json(*r.in_Fq_i) : json(nullptr);
  auto violation = [](const std::optional<MomentViolation>& v) -> json {
    if (!v) return nullptr;
    return {{"condition", std::string(to_string(v->condition))}, {"m", v->m}, {"n", v->n}, {"margin", v->margin}};
  };
  doc["first_violation"] = violation(r.first_violation);
  doc["index_violation"] = violation(r.index_violation);
  return doc;
}

json to_json(const Estimate& e) {
  return {{"type", "estimate"},
          {"mean", complex_to_json(e.mean)},
          {"standard_error", e.standard_error},
          {"effective_samples", e.effective_samples},
          {"sample_variance", e.sample_variance},
          {"sweeps", e.sweeps},
          {"burn_in", e.burn_in},
          {"samples", e.samples}};
}

}  // namespace potts::io
