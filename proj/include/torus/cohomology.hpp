#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "torus/glattice.hpp"

namespace torus {

struct ResolutionNotCoflabby : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class H1Method { CyclicFormula, PresentationCocycle };
std::string to_string(H1Method m);

struct CohomologyReport {
  Subgroup H;
  int degree = 1;
  std::vector<Int> invariant_factors;  // all > 1, d_1 | d_2 | ...
  std::size_t free_rank = 0;           // degree 0 only
  H1Method method = H1Method::PresentationCocycle;

  bool vanishes() const { return invariant_factors.empty() && free_rank == 0; }
  std::vector<Int> elementary_divisors() const;  // prime powers, sorted
  nlohmann::json to_json() const;
};

// H^1 by the cyclic formula when H is cyclic, otherwise through a presentation.
CohomologyReport h1(const GLattice& M, const Subgroup& H);
CohomologyReport h1_cyclic(const GLattice& M, const Subgroup& H);        // H must be cyclic
CohomologyReport h1_presentation(const GLattice& M, const Subgroup& H);  // any H
CohomologyReport h0(const GLattice& M, const Subgroup& H);

struct CoflabbyReport {
  bool coflabby = true;
  std::vector<CohomologyReport> table;  // one per class, canonical order
  std::optional<Subgroup> first_failure;
};
// jobs <= 0 uses the OpenMP default.
CoflabbyReport coflabby_report(const GLattice& M, SubgroupFilter filter = SubgroupFilter::PrimePower, int jobs = 0);
CoflabbyReport coflabby_report_serial(const GLattice& M, SubgroupFilter filter = SubgroupFilter::PrimePower);
bool is_coflabby(const GLattice& M, SubgroupFilter filter = SubgroupFilter::PrimePower, int jobs = 0);
bool is_flabby(const GLattice& M, SubgroupFilter filter = SubgroupFilter::PrimePower, int jobs = 0);

struct CoflabbyResolution {
  GLatticeMap inclusion;   // F -> R
  GLatticeMap projection;  // R -> M
  std::vector<std::pair<Subgroup, IntMatrix>> summands;  // (H, image of the base coset in M)
  const GLattice& F() const { return inclusion.source(); }
  const GLattice& R() const { return projection.source(); }
};
// Adds Z[G/H] summands, largest H first, until R^H -> M^H is onto for every class; F is re-checked.
CoflabbyResolution coflabby_resolution(const GLattice& M, int jobs = 0);

enum class TriState { Yes, No, Inconclusive };
std::string to_string(TriState t);

struct InvertibilityCertificate {
  TriState verdict = TriState::Inconclusive;
  std::string reason;
  std::optional<CoflabbyResolution> resolution;
  std::optional<GLatticeMap> section;  // M -> R splitting the resolution
  std::optional<Subgroup> witness;     // subgroup with nonzero H^1 of M or its dual
};
InvertibilityCertificate is_invertible_certified(const GLattice& M, int jobs = 0);

std::string cohomology_table_text(const std::vector<CohomologyReport>& table);
nlohmann::json cohomology_table_json(const std::vector<CohomologyReport>& table);

}  // namespace torus
