#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "torus/glattice.hpp"

namespace torus {

struct NoDominatedPair : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContainsG : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Member {
  Subgroup H;
  std::vector<long> weights;  // ascending; length is the multiplicity
  std::size_t multiplicity() const { return weights.size(); }
};

class WeightedMultiset {
 public:
  WeightedMultiset() = default;
  // Merges equal subgroups, sorts weights and orders members canonically.
  WeightedMultiset(GroupPtr G, std::vector<Member> members);
  static WeightedMultiset of(const std::vector<Subgroup>& subs);  // all weights 1

  const GroupPtr& group() const { return G_; }
  const std::vector<Member>& members() const { return members_; }
  std::size_t size() const;  // copies counted with multiplicity
  std::vector<Subgroup> underlying_set() const;
  std::vector<Subgroup> expanded() const;  // one entry per copy, basis order
  std::vector<long> expanded_weights() const;
  bool is_unweighted() const;
  bool is_normalized() const;
  bool contains(const Subgroup& H) const;

  std::string describe() const;
  nlohmann::json to_json() const;
  static WeightedMultiset from_json(const GroupPtr& G, const nlohmann::json& j);
  bool operator==(const WeightedMultiset& o) const;

 private:
  GroupPtr G_;
  std::vector<Member> members_;
};

long d_of(const WeightedMultiset& ms);  // gcd of indices
std::vector<long> prime_set(const WeightedMultiset& ms);
long mu_of(const WeightedMultiset& ms);
long M_of(const WeightedMultiset& ms);

WeightedMultiset normalize_weights(const WeightedMultiset& ms);

struct MultinormLattice {
  WeightedMultiset mset;
  bool dual_side = false;  // false: I, true: J
  GLattice lattice;
  GLattice cover;       // the permutation lattice of the multiset
  IntMatrix inclusion;  // I side: saturated kernel basis inside the cover
};
GLatticeMap weighted_augmentation(const WeightedMultiset& ms);
MultinormLattice build_I(const WeightedMultiset& ms);
MultinormLattice build_J(const WeightedMultiset& ms);
// J as the cokernel of Z -> cover, with the isomorphism onto dual(I).
struct JCokernel {
  GLattice lattice;
  IntMatrix to_dual_I;
};
JCokernel build_J_cokernel(const WeightedMultiset& ms);

// Witnesses up to this rank are re-verified when built; larger ones are trusted.
inline constexpr std::size_t kWitnessVerifyRank = 256;

// source -> target, certified unimodular and equivariant.
struct IsoWitness {
  GLattice source, target;
  IntMatrix matrix;
  bool verified = false;
  bool verify() const;
  IsoWitness dual() const;  // source° -> target° via the inverse transpose
};

// I_before ~= I_after (+) Z[G/S_1] (+) ... in extraction order.
struct Reduction {
  WeightedMultiset before, after;
  std::vector<Subgroup> summands;
  std::vector<std::string> steps;
  IsoWitness witness;
};

// One step: drop copy a (subgroup H0) using copy b (H1) with H0 inside g H1 g^-1 and weight divisibility.
Reduction shear_remove(const WeightedMultiset& ms, std::size_t a, std::size_t b, int g);
std::optional<Reduction> dominated_step(const WeightedMultiset& ms);
Reduction dominated_step_or_throw(const WeightedMultiset& ms);  // NoDominatedPair
Reduction remove_dominated(const WeightedMultiset& ms);          // iterated to a fixpoint

WeightedMultiset reduce_red(const WeightedMultiset& ms);
bool is_reduced(const std::vector<Subgroup>& set);
bool is_strongly_reduced(const std::vector<Subgroup>& set);
Reduction reduce_srd(const WeightedMultiset& ms);
std::vector<Subgroup> srd_members(const WeightedMultiset& ms);  // the set reduce_srd keeps, no witness

Reduction conjugate_normal_form(const WeightedMultiset& ms);

struct RestrictedMultiset {
  WeightedMultiset mset;  // over sub.group
  SubgroupAsGroup sub;
  std::vector<Subgroup> in_parent;  // members as subgroups of the original group
  IsoWitness witness;               // restriction of I -> I over the subgroup
};
RestrictedMultiset restrict_multiset(const WeightedMultiset& ms, const Subgroup& P);
// Same members and weights as restrict_multiset(ms, P).mset, without lattices.
WeightedMultiset restricted_members(const WeightedMultiset& ms, const SubgroupAsGroup& sub);

struct QuotientMultiset {
  WeightedMultiset mset;  // over quotient.Q, normalized
  Quotient quotient;
  IsoWitness witness;     // I^N (as a G/N-lattice) -> I over G/N
};
QuotientMultiset quotient_multiset(const WeightedMultiset& ms, const Subgroup& N);

bool is_special(const std::vector<Subgroup>& set);
std::optional<std::vector<Subgroup>> find_special_subset(const std::vector<Subgroup>& set, std::size_t size);
// Members of the reduced set containing some member of a special subset.
std::vector<Subgroup> lift_special_to_red(const WeightedMultiset& ms, const std::vector<Subgroup>& special);
// P cap g H g^-1 for each member H, with the least g attaining the p-part of (G:H); P a Sylow p-subgroup.
// Special as a set of subgroups of P.
std::vector<Subgroup> sylow_special_transfer(const std::vector<Subgroup>& special, const Subgroup& P, long p);

}  // namespace torus
