#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "torus/cohomology.hpp"

namespace torus {

struct EvenM : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IdentityFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CaseFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GeneratorRecoveryFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SplittingNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Z[G] elements as coefficient vectors indexed by element id.
using GroupRingElement = std::vector<Int>;

// Objects over D_{2m} = <sigma, tau>, sigma of order 2m, m odd.
struct DihedralBundle {
  long m = 0;
  GroupPtr G;
  int sigma = 0, tau = 0;
  Subgroup Hs, Ht;  // <sigma^m>, <tau>

  GLattice R1, R2, R3, R;  // Z[G], Z[G/<sigma^m>], Z, and their sum
  GLattice cover;          // Z[G/<sigma^m>] (+) Z[G/<tau>]
  GLattice I;              // augmentation kernel of the cover
  IntMatrix I_basis;       // columns in cover coordinates
  IntMatrix Psi_cover;     // R -> cover
  GLatticeMap Psi;         // R -> I
  GLattice E;              // ker Psi
  IntMatrix E_basis;       // columns in R coordinates
  std::vector<Int> x1;     // in R coordinates

  std::size_t offset2() const { return R1.rank(); }
  std::size_t offset3() const { return R1.rank() + R2.rank(); }
  int s(long k) const { return G->power(sigma, k); }
  int st(long k) const { return G->mul(G->power(sigma, k), tau); }  // sigma^k tau
};

DihedralBundle build_bundle(long m);

// u(base coset of H), as a coefficient vector on the cosets of H.
std::vector<Int> ring_apply(const Subgroup& H, const GroupRingElement& u);
GroupRingElement ring_mul(const GroupPtr& G, const GroupRingElement& a, const GroupRingElement& b);

// R element from components in Z[G], Z[G] acting on the base coset of <sigma^m>, and Z.
std::vector<Int> r_vector(const DihedralBundle& b, const GroupRingElement& a1, const GroupRingElement& a2, long a3);
std::vector<Int> cover_vector(const DihedralBundle& b, const std::vector<Int>& r);  // Psi in cover coordinates

struct ZfsjReport {
  bool ok = false;
  bool literal_ok = false;  // uncorrected preimage formulas
  std::vector<Int> literal_residual;  // cover coordinates of Psi(literal) - target, second generator
  std::vector<std::vector<Int>> preimages;  // in R, both fixed by sigma^m
  bool generation_ok = false;  // the two targets generate I_{m,0}
  bool containment_ok = false;  // I_{m,0} inside Psi(R^<sigma^m>)
  nlohmann::json to_json() const;
};
ZfsjReport certify_zfsj(const DihedralBundle& b);

struct ResolutionCase {
  Subgroup H;
  std::string container;  // first of <s^m>, <t>, <s^m t>, <s^m, t>, <s^2> containing a conjugate
  bool h1_vanishes = false;
  bool fixed_onto = false;
  bool permutation_h1_vanishes = false;  // H^1(H, R) = 0
};
struct CoflabbyCertificate {
  bool exact = false;
  bool ok = false;
  std::vector<ResolutionCase> cases;
  nlohmann::json to_json() const;
};
// jobs <= 0 uses the OpenMP default.
CoflabbyCertificate certify_coflabby_resolution(const DihedralBundle& b, int jobs = 0);
CoflabbyCertificate certify_coflabby_resolution_serial(const DihedralBundle& b);

// Four-term diagram lemma: rank M1 = rank M1', f2 and f3 injective, coker f2 torsion-free => f1 iso.
struct DiagramLemmaCheck {
  bool hypotheses = false;
  bool conclusion = false;
};
DiagramLemmaCheck check_diagram_lemma(const IntMatrix& f1, const IntMatrix& f2, const IntMatrix& f3);

struct SplittingCertificate {
  // D^(m) decomposition of E
  bool x1_in_E = false, x1_fixed = false, x1_orbit_free = false;
  bool subgroup_split = false;        // split_exact over D^(m)
  bool subgroup_decomposition = false;  // E = E' (+) Z[D^(m)] x1, E' ~ Z[D^(m)/<s^2>]
  // Fixed lattice under <sigma^2>
  bool fixed_character_match = false;
  GLatticeMap fixed_iso;  // Z[G/<s>] (+) Z[G/<s^2, s t>] -> E^<s^2>
  std::vector<Int> y0, y1;  // E coordinates
  // Xi: Q -> E
  GLattice Q;
  GLatticeMap Xi;
  bool Xi_onto = false;
  GLattice F;
  IntMatrix F_basis;  // in Q coordinates
  std::vector<Int> F_divisors;
  bool F_fixed = false;
  DiagramLemmaCheck F_lemma;
  std::optional<GLatticeMap> F_iso;  // Z[G/<s^2, s^m t>] -> F
  std::optional<GLatticeMap> section;  // E -> Q
  IntMatrix theta;  // E (+) Z[G/<s^2, s^m t>] -> Q, unimodular and equivariant
  bool theta_ok = false;
  std::size_t rank_E_fixed = 0, rank_Q_fixed = 0;
  bool ok = false;
  nlohmann::json to_json() const;
};
SplittingCertificate certify_invertibility_and_splitting(const DihedralBundle& b);

// B unimodular and B^-1 g B a permutation matrix for every generator g.
bool is_permutation_basis(const GLattice& M, const IntMatrix& B);

struct QuasiPermutationCertificate {
  long m = 0;
  ZfsjReport zfsj;
  CoflabbyCertificate coflabby;
  SplittingCertificate splitting;
  bool tilde_exact = false;  // 0 -> E~ -> R~ -> I -> 0
  bool dual_exact = false;   // 0 -> J -> R~° -> E~° -> 0
  bool R_dual_permutation = false;
  bool E_dual_permutation = false;
  IntMatrix E_dual_basis;  // permuted basis of E~°
  std::vector<std::string> notes;
  bool ok = false;
  nlohmann::json to_json() const;
};
QuasiPermutationCertificate certify_nzf2(long m, int jobs = 0);

// Rebuilds the bundle from m and re-checks every serialized matrix.
bool validate_certificate(const nlohmann::json& cert, std::string* why = nullptr);

}  // namespace torus
