#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "torus/group.hpp"
#include "torus/zlin.hpp"

namespace torus {

struct NotEquivariant : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotExact : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SearchExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Left cosets gH in the order of their minimal elements.
struct CosetSpace {
  Subgroup H;
  std::vector<int> reps;
  std::vector<int> coset_of;  // element -> coset index
  std::size_t size() const { return reps.size(); }
};
CosetSpace coset_space(const Subgroup& H);

// A direct summand Z[G/H] occupying columns [offset, offset + (G:H)) of a permutation basis.
struct PermSummand {
  Subgroup H;
  std::size_t offset = 0;
};

class GLattice {
 public:
  GLattice() = default;
  // Verifies unimodularity and that the generator matrices define a representation.
  GLattice(GroupPtr G, std::vector<IntMatrix> gen_actions, std::vector<std::string> labels = {});
  // Skips verification; for lattices that are correct by construction.
  static GLattice trusted(GroupPtr G, std::vector<IntMatrix> gen_actions, std::vector<std::string> labels = {});

  const GroupPtr& group() const { return G_; }
  std::size_t rank() const { return rank_; }
  const std::vector<IntMatrix>& generator_actions() const { return gens_; }
  const std::vector<std::string>& labels() const { return labels_; }
  IntMatrix action(int g) const;
  std::vector<IntMatrix> all_actions() const;  // indexed by element id

  // Set when the standard basis is a union of coset bases.
  const std::optional<std::vector<PermSummand>>& perm_structure() const { return perm_; }
  void set_perm_structure(std::vector<PermSummand> s) { perm_ = std::move(s); }

  nlohmann::json to_json() const;
  static GLattice from_json(const GroupPtr& G, const nlohmann::json& j);

 private:
  GroupPtr G_;
  std::size_t rank_ = 0;
  std::vector<IntMatrix> gens_;
  std::vector<std::string> labels_;
  std::optional<std::vector<PermSummand>> perm_;
};

bool verify_representation(const GLattice& M);

class GLatticeMap {
 public:
  GLatticeMap() = default;
  // matrix is target_rank x source_rank; equivariance is checked.
  GLatticeMap(GLattice source, GLattice target, IntMatrix matrix);
  static GLatticeMap trusted(GLattice source, GLattice target, IntMatrix matrix);
  const GLattice& source() const { return src_; }
  const GLattice& target() const { return tgt_; }
  const IntMatrix& matrix() const { return mat_; }
  GLatticeMap then(const GLatticeMap& next) const;  // next o this
  nlohmann::json to_json() const;

 private:
  GLattice src_, tgt_;
  IntMatrix mat_;
};

bool is_equivariant(const GLattice& A, const GLattice& B, const IntMatrix& X);

GLattice trivial_lattice(const GroupPtr& G, std::size_t rank = 1);
// Rank-1 lattice where generator k acts by signs[k] (must be +-1 and define a character).
GLattice character_lattice(const GroupPtr& G, const std::vector<int>& signs);
GLattice permutation_lattice(const Subgroup& H);
GLattice permutation_lattice(const std::vector<Subgroup>& Hs);  // direct sum
GLattice regular_lattice(const GroupPtr& G);
GLatticeMap augmentation(const Subgroup& H);  // Z[G/H] -> Z, gH -> 1
GLatticeMap augmentation(const std::vector<Subgroup>& Hs);
GLattice direct_sum(const std::vector<GLattice>& parts);
GLattice dual(const GLattice& M);

// G-stable saturated sublattice spanned by the columns of basis (full column rank).
GLattice sublattice(const GLattice& M, const IntMatrix& basis);

struct FixedLattice {
  GLattice lattice;     // over G when N is normal, otherwise over the normalizer as a group
  IntMatrix inclusion;  // columns: saturated basis of M^N
  std::optional<SubgroupAsGroup> acting;  // set when the normalizer acts
};
IntMatrix fixed_basis(const GLattice& M, const Subgroup& N);
FixedLattice fixed_lattice(const GLattice& M, const Subgroup& N);
GLattice coinvariant_lattice(const GLattice& M, const Subgroup& N);

struct Restriction {
  GLattice lattice;
  SubgroupAsGroup sub;
};
Restriction restrict(const GLattice& M, const Subgroup& H);

// Z-basis of Hom_G(A, B) as B.rank x A.rank matrices.
std::vector<IntMatrix> equivariant_homs(const GLattice& A, const GLattice& B);
// Serial reference without the permutation-source shortcut.
std::vector<IntMatrix> equivariant_homs_generic(const GLattice& A, const GLattice& B);

IntMatrix kernel_of(const GLatticeMap& f);  // saturated basis
GLattice kernel_lattice(const GLatticeMap& f);

struct ExactnessReport {
  bool exact = true;
  std::size_t junction = 0;  // 0: injectivity at the start, k: surjectivity at the end
  std::string failure;
  std::vector<Int> witness;
};
// Checks 0 -> A_0 -> A_1 -> ... -> A_k -> 0 for the maps A_{i-1} -> A_i.
ExactnessReport check_exact(const std::vector<GLatticeMap>& maps);

struct SplitResult {
  std::optional<GLatticeMap> section;
  std::optional<SolveObstruction> obstruction;  // on the coefficient system over the hom basis
  explicit operator bool() const { return section.has_value(); }
};
// Equivariant s: C -> B with p o s = id for 0 -> A -> B -p-> C -> 0.
SplitResult split_exact(const GLatticeMap& i, const GLatticeMap& p);
SplitResult find_section(const GLatticeMap& p);

// rank M^H for each H in subgroups_up_to_conjugacy(G, All).
std::vector<std::size_t> permutation_character(const GLattice& M);

struct IsoSearchOptions {
  long bound = 3;
  std::size_t max_tries = 200000;
};
// A unimodular equivariant A -> B, or nullopt when the characters differ; SearchExhausted otherwise.
std::optional<GLatticeMap> find_isomorphism(const GLattice& A, const GLattice& B, IsoSearchOptions opt = {});
bool is_stably_permutation_witness(const GLattice& M, const GLattice& addend, const GLattice& target,
                                   IsoSearchOptions opt = {});

nlohmann::json matrix_to_json(const IntMatrix& A);
IntMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace torus
