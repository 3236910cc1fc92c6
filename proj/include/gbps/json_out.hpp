#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbps/errors.hpp"
#include "gbps/exponent_fit.hpp"
#include "gbps/kernel.hpp"
#include "gbps/pipeline.hpp"

namespace gbps {

inline nlohmann::json fit_report_json(const ExponentFit& fit) {
  return {
      {"slope", fit.slope},
      {"intercept", fit.intercept},
      {"residual_rms", fit.residual_rms},
      {"delta", estimate_delta(fit)},
      {"sample_count", fit.sample_count},
      {"dropped_count", fit.dropped_count},
  };
}

inline nlohmann::json arc_run_json(const ArcRunReport& r) {
  return {
      {"N", r.N},
      {"M", r.M},
      {"L", r.L},
      {"delta", r.delta},
      {"psi_sieve", r.psi_sieve},
      {"psi_extracted", r.psi_extracted},
      {"major_re", r.major_re},
      {"minor_re", r.minor_re},
      {"total_re", r.total_re},
      {"total_im", r.total_im},
      {"t0", r.t0},
      {"parseval_lhs", r.parseval_lhs},
      {"parseval_rhs", r.parseval_rhs},
      {"kernel_l2_minor", r.kernel_l2_minor},
  };
}

inline nlohmann::json parseval_report_json(const ParsevalReport& r) {
  return {
      {"N", r.N},      {"M", r.M},      {"L", r.L},
      {"lhs", r.lhs},  {"rhs", r.rhs},  {"tail_bound", r.tail_bound},
  };
}

inline nlohmann::json report_summary_json(const ReportSummary& rs) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rs.checks) {
    checks.push_back({
        {"name", c.name},
        {"pass", c.pass},
        {"observed", c.observed},
        {"bound", c.bound},
        {"detail", c.detail},
    });
  }
  return {
      {"delta", rs.delta},   {"epsilon", rs.epsilon},
      {"N_list", rs.n_list}, {"checks", checks},
      {"all_pass", rs.all_pass},
  };
}

// Just enough of JSON Schema to pin the shipped report formats: "type"
// (object, array, string, number, integer, boolean), "required",
// "properties", and "items".
inline bool schema_validate(const nlohmann::json& doc,
                            const nlohmann::json& schema,
                            std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (schema.contains("type")) {
    const std::string t = schema["type"].get<std::string>();
    if (t == "object" && !doc.is_object()) return fail("expected object");
    if (t == "array" && !doc.is_array()) return fail("expected array");
    if (t == "string" && !doc.is_string()) return fail("expected string");
    if (t == "number" && !doc.is_number()) return fail("expected number");
    if (t == "integer" && !doc.is_number_integer()) {
      return fail("expected integer");
    }
    if (t == "boolean" && !doc.is_boolean()) return fail("expected boolean");
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!doc.contains(key.get<std::string>())) {
        return fail("missing required key " + key.get<std::string>());
      }
    }
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (!doc.contains(key)) continue;
      std::string inner;
      if (!schema_validate(doc.at(key), sub, &inner)) {
        return fail(key + ": " + inner);
      }
    }
  }
  if (schema.contains("items") && doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      std::string inner;
      if (!schema_validate(doc[i], schema["items"], &inner)) {
        return fail("item " + std::to_string(i) + ": " + inner);
      }
    }
  }
  if (why) why->clear();
  return true;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw format_error("cannot open " + path);
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error("invalid JSON in " + path + ": " + e.what());
  }
  return doc;
}

}  // namespace gbps
