#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "torus/multinorm.hpp"

namespace torus {

struct InternalContradiction : std::logic_error {
  using std::logic_error::logic_error;
};
struct NotSylowCyclic : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotDihedral : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Level {
  StablyPermutation,
  QuasiPermutation,
  QuasiInvertibleOnly,  // quasi-invertible, proven not quasi-permutation
  NotQuasiInvertible,
  QuasiInvertibleQPUnknown,
  Unknown
};
std::string to_string(Level l);
Level level_from_string(const std::string& s);
bool is_quasi_invertible(Level l);  // proven
bool is_decided(Level l);           // quasi-permutation question settled

struct RuleInfo {
  std::string id;
  std::string anchor;
};
const std::vector<RuleInfo>& rule_table();

struct TraceStep {
  std::string rule;
  std::string anchor;
  nlohmann::json input;  // snapshot accepted by apply_rule
  std::string conclusion;
  nlohmann::json to_json() const;
};

struct Verdict {
  Level level = Level::Unknown;
  std::vector<TraceStep> trace;
  std::optional<GLatticeMap> section;  // Z -> cover splitting the augmentation
  nlohmann::json to_json() const;
  std::string trace_text() const;
};

// Deterministic rule evaluation on a snapshot; replay reruns every step.
struct RuleResult {
  std::string conclusion;
  nlohmann::json data;
};
RuleResult apply_rule(const std::string& rule, const GroupPtr& G, const nlohmann::json& input);
bool replay(const Verdict& v, const GroupPtr& G, std::string* mismatch = nullptr);

struct ClassifyOptions {
  int sylow_conjugator = 0;  // Sylow subgroups are conjugated by this element
};
Verdict classify(const WeightedMultiset& ms, const ClassifyOptions& opt = {});

// Quasi-invertibility test on one Sylow subgroup.
struct SylowTest {
  long p = 0;
  Subgroup P;
  std::vector<Subgroup> reduced;  // red (odd p) or srd (p = 2) of the restriction, as subgroups of G
  Subgroup core;                  // normal core in P of the reduced set
  bool qi = false;
  std::string criterion;
};
SylowTest sylow_test(const WeightedMultiset& ms, long p, int conjugator = 0);

std::vector<long> p_star_set(const GroupPtr& G);

struct HallDecomposition {
  Subgroup N, complement;  // G = N x| complement, both cyclic, coprime orders
};
HallDecomposition hall_decomposition(const GroupPtr& G);

struct DihedralMatch {
  long d = 0;
  std::optional<std::string> label;  // "odd", "a", "b", "c", "d"
  bool via_automorphism = false;     // matched after tau -> sigma tau
  std::vector<Subgroup> picture;     // 2-Sylow picture of the input
};
DihedralMatch dihedral_case_match(const WeightedMultiset& ms);
Verdict classify_dihedral(const WeightedMultiset& ms);

}  // namespace torus
