#pragma once

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace torus {

struct InvalidPresentation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OrderOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotADivisor : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotNormal : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Default 20000, overridden by TORUS_MAX_ORDER.
long max_group_order();

enum class GroupKind { Cyclic, Dihedral, Product, Semidirect, Permutation, Quotient };
std::string to_string(GroupKind k);

using Perm = std::vector<std::uint32_t>;

class FiniteGroup {
 public:
  // Elements are enumerated breadth-first from the identity by right multiplication
  // with the generators, so element ids and words are deterministic.
  FiniteGroup(std::size_t degree, std::vector<Perm> gens, std::vector<std::string> names, GroupKind kind,
              long param, long bound);

  int order() const { return static_cast<int>(perms_.size()); }
  int identity() const { return 0; }
  int mul(int a, int b) const;
  int inv(int a) const { return inv_[a]; }
  int conj(int g, int h) const { return mul(mul(g, h), inv(g)); }  // g h g^-1
  int power(int g, long k) const;
  int element_order(int g) const { return elem_order_[g]; }

  const std::vector<int>& generators() const { return gens_; }
  const std::vector<std::string>& generator_names() const { return names_; }
  GroupKind kind() const { return kind_; }
  long param() const { return param_; }

  // Word in generator indices with g = gens[w0] * gens[w1] * ...
  std::vector<int> word(int g) const;
  std::string element_name(int g) const;
  int parse_element(const std::string& text) const;
  // Breadth-first tree: g = parent(g) * generators()[parent_gen(g)].
  int parent(int g) const { return parent_[g]; }
  int parent_gen(int g) const { return parent_gen_[g]; }

  const Perm& perm(int g) const { return perms_[g]; }
  std::size_t degree() const { return degree_; }
  int find(const Perm& p) const;  // -1 when absent

  nlohmann::json spec;  // originating GroupSpec when available

 private:
  std::size_t degree_;
  std::vector<Perm> perms_;
  std::vector<int> gens_;
  std::vector<std::string> names_;
  GroupKind kind_;
  long param_;
  std::vector<int> table_;  // order*order when small
  std::vector<int> inv_, parent_, parent_gen_, elem_order_;
  struct PermHash {
    std::size_t operator()(const Perm& p) const;
  };
  std::unordered_map<Perm, int, PermHash> index_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

GroupPtr make_cyclic(long n);
GroupPtr make_dihedral(long n);  // order 2n; generators s (rotation), t (reflection)
GroupPtr make_product(const std::vector<GroupPtr>& factors);
// action[i][k] = image of the k-th generator of N under the i-th generator of Q.
GroupPtr make_semidirect(const GroupPtr& N, const GroupPtr& Q, const std::vector<std::vector<int>>& action);
GroupPtr make_permutation_group(std::size_t degree, const std::vector<Perm>& gens);
GroupPtr make_group(const nlohmann::json& spec);

class Subgroup {
 public:
  Subgroup() = default;
  Subgroup(GroupPtr g, std::vector<int> gens);  // closure of gens

  const GroupPtr& group() const { return G_; }
  const std::vector<int>& generators() const { return gens_; }
  const std::vector<int>& elements() const { return elems_; }  // sorted
  int order() const { return static_cast<int>(elems_.size()); }
  bool contains(int g) const { return member_[g] != 0; }
  bool contains(const Subgroup& K) const;
  bool operator==(const Subgroup& o) const { return elems_ == o.elems_; }
  bool operator!=(const Subgroup& o) const { return elems_ != o.elems_; }
  // Canonical order: by order, then lexicographically by sorted element list.
  bool operator<(const Subgroup& o) const;
  std::string describe() const;  // "<s^3, t>"

 private:
  GroupPtr G_;
  std::vector<int> gens_, elems_;
  std::vector<char> member_;
};

Subgroup trivial_subgroup(const GroupPtr& G);
Subgroup whole_group(const GroupPtr& G);
Subgroup conjugate(const Subgroup& H, int g);  // g H g^-1
Subgroup intersection(const Subgroup& A, const Subgroup& B);
Subgroup join(const Subgroup& A, const Subgroup& B);
bool is_normal(const Subgroup& H);
bool is_cyclic(const Subgroup& H);
std::optional<int> cyclic_generator(const Subgroup& H);
bool is_p_group(const Subgroup& H, long* p = nullptr);
// |A B| == |G| as sets.
bool product_is_whole(const Subgroup& A, const Subgroup& B);
bool are_conjugate(const Subgroup& A, const Subgroup& B);
Subgroup conjugacy_class_min(const Subgroup& H);  // lexicographically minimal conjugate
// Greedy generating set over the elements in id order (short words first).
std::vector<int> small_generating_set(const Subgroup& H);

std::vector<long> prime_factors(long n);
long p_part(long n, long p);

Subgroup sylow(const GroupPtr& G, long p);
Subgroup sylow_in(const Subgroup& H, long p);
Subgroup normal_core(const Subgroup& H);
Subgroup normalizer(const Subgroup& H);
Subgroup multiset_core(const std::vector<Subgroup>& members);

std::vector<int> double_cosets(const Subgroup& P, const Subgroup& H);
std::vector<int> left_coset_reps(const Subgroup& H);  // minimal element of each gH, ascending

enum class SubgroupFilter { All, PrimePower };
std::vector<Subgroup> all_subgroups(const GroupPtr& G);
std::vector<Subgroup> subgroups_of(const Subgroup& H);
std::vector<Subgroup> subgroups_up_to_conjugacy(const GroupPtr& G, SubgroupFilter filter);

struct Quotient {
  GroupPtr Q;
  std::vector<int> proj;  // element of G -> element of Q
  Subgroup N;
  Subgroup image(const Subgroup& H) const;     // HN/N
  Subgroup preimage(const Subgroup& K) const;  // full preimage in G
};
Quotient quotient_group(const Subgroup& N);

// Elements (s, t) with s of order n, t an involution outside <s>, t s t^-1 = s^-1, |G| = 2n.
std::optional<std::pair<int, int>> dihedral_generators(const GroupPtr& G);
bool all_sylow_cyclic(const GroupPtr& G);

// H realized as a group in its own right, with the element correspondence.
struct SubgroupAsGroup {
  GroupPtr group;
  GroupPtr parent;
  std::vector<int> to_parent;    // element of group -> element of H's parent
  std::vector<int> from_parent;  // -1 outside H
};
SubgroupAsGroup as_group(const Subgroup& H);
Subgroup localize(const SubgroupAsGroup& A, const Subgroup& K);  // K inside H, as a subgroup of A.group
Subgroup globalize(const SubgroupAsGroup& A, const Subgroup& K);  // back into the parent
bool is_nilpotent(const GroupPtr& G);

}  // namespace torus
