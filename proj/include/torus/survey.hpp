#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "torus/rationality.hpp"

namespace torus {

struct SurveyOptions {
  std::size_t max_members = 2;
  int min_order = 1;             // member order bounds, inclusive
  int max_order = 0;             // 0: no upper bound besides |G| - 1
  std::optional<long> d_filter;  // keep only multisets with this d
};

struct SurveyRow {
  std::vector<Subgroup> members;  // lexicographically least simultaneous conjugate
  long d = 0;
  Level level = Level::Unknown;
  std::string rule;  // last rule of the trace
  std::string error;
  nlohmann::json to_json() const;
};

struct Survey {
  std::vector<SurveyRow> rows;
  bool contradiction = false;
  nlohmann::json to_json() const;
  std::string text() const;
};

// Strongly reduced multisets of proper subgroups, one per simultaneous conjugacy class.
std::vector<std::vector<Subgroup>> survey_multisets(const GroupPtr& G, const SurveyOptions& opt);

// jobs <= 0 uses the OpenMP default.
Survey run_survey(const GroupPtr& G, const SurveyOptions& opt, int jobs = 0);
Survey run_survey_serial(const GroupPtr& G, const SurveyOptions& opt);

}  // namespace torus
