#include "torus/dihedral.hpp"

#include <omp.h>

#include <algorithm>

namespace torus {

namespace {

using json = nlohmann::json;

GroupRingElement unit(const GroupPtr& G, int g, long c = 1) {
  GroupRingElement u(G->order(), 0);
  u[g] = c;
  return u;
}

GroupRingElement operator+(GroupRingElement a, const GroupRingElement& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

GroupRingElement operator-(GroupRingElement a, const GroupRingElement& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

GroupRingElement zero(const GroupPtr& G) { return GroupRingElement(G->order(), 0); }

json vec_json(const std::vector<Int>& v) { return matrix_to_json(IntMatrix::column_vector(v)); }

std::vector<Int> vec_from_json(const json& j) { return matrix_from_json(j).col(0); }

std::vector<Int> mat_vec(const IntMatrix& A, const std::vector<Int>& v) {
  return (A * IntMatrix::column_vector(v)).col(0);
}

bool is_zero_vec(const std::vector<Int>& v) {
  return std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; });
}

// Columns g * v for the coset representatives of H.
IntMatrix orbit_columns(const GLattice& M, const Subgroup& H, const std::vector<Int>& v) {
  CosetSpace cs = coset_space(H);
  IntMatrix out(M.rank(), cs.size());
  for (std::size_t c = 0; c < cs.size(); ++c) {
    std::vector<Int> w = mat_vec(M.action(cs.reps[c]), v);
    for (std::size_t i = 0; i < w.size(); ++i) out(i, c) = w[i];
  }
  return out;
}

bool onto_full(const IntMatrix& A, std::size_t target_rank) {
  if (target_rank == 0) return true;
  SnfResult s = snf(A);
  return s.rank == target_rank &&
         std::all_of(s.divisors.begin(), s.divisors.end(), [](const Int& d) { return d == 1; });
}

// sum_{j=0}^{upper} sigma^{4j}; empty when upper < 0.
GroupRingElement sigma4_sum(const DihedralBundle& b, long upper) {
  GroupRingElement u = zero(b.G);
  for (long j = 0; j <= upper; ++j) u[b.s(4 * j)] += 1;
  return u;
}

GroupRingElement norm_sigma(const DihedralBundle& b) {
  GroupRingElement u = zero(b.G);
  for (long i = 0; i < 2 * b.m; ++i) u[b.s(i)] += 1;
  return u;
}

struct ZfsjData {
  std::vector<Int> target1, target2;  // cover coordinates
  std::vector<Int> pre1, pre2_literal, pre2;
};

ZfsjData zfsj_data(const DihedralBundle& b) {
  const auto& G = b.G;
  const long m = b.m;
  auto e = [&](int g) { return unit(G, g); };
  const GroupRingElement one = e(0), t = e(b.tau);
  ZfsjData d;
  auto target = [&](const GroupRingElement& u) {
    std::vector<Int> v = ring_apply(b.Hs, u);
    v.resize(b.cover.rank(), 0);
    return v;
  };
  d.target1 = target(one - e(b.s(m - 2)));
  d.target2 = target(one - e(b.st(m - 2)));

  d.pre1 = r_vector(b, ring_mul(G, zero(G) - e(b.s(-2)), one + e(b.s(m))), e(b.s(-2)), 0);

  const GroupRingElement u1 = ring_mul(G, norm_sigma(b), one - t);
  const GroupRingElement tm1 = t - one;
  GroupRingElement x2_literal, x2;
  if (m % 4 == 1) {
    x2 = ring_mul(G, ring_mul(G, sigma4_sum(b, (m - 5) / 4), e(b.s(1)) + e(b.s(2))), tm1);
    x2_literal = x2;
  } else {
    GroupRingElement inner = ring_mul(G, sigma4_sum(b, (m - 7) / 4), e(b.s(2)) + e(b.s(3)));
    x2_literal = e(b.s(-1)) + ring_mul(G, inner, tm1);
    x2 = ring_mul(G, e(b.s(-1)) + inner, tm1);
  }
  d.pre2_literal = r_vector(b, u1, x2_literal, 0);
  d.pre2 = r_vector(b, u1 - norm_sigma(b), x2, 1);
  return d;
}

std::vector<Int> subtract(std::vector<Int> a, const std::vector<Int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

bool fixed_by(const GLattice& M, int g, const std::vector<Int>& v) { return mat_vec(M.action(g), v) == v; }

std::vector<Subgroup> case_containers(const DihedralBundle& b) {
  const auto& G = b.G;
  return {b.Hs, b.Ht, Subgroup(G, {b.st(b.m)}), Subgroup(G, {b.s(b.m), b.tau}), Subgroup(G, {b.s(2)})};
}

const char* const kContainerNames[] = {"<s^m>", "<t>", "<s^m t>", "<s^m, t>", "<s^2>"};

ResolutionCase resolution_case(const DihedralBundle& b, const Subgroup& H, const std::vector<Subgroup>& containers) {
  ResolutionCase c;
  c.H = H;
  c.container = "none";
  for (std::size_t k = 0; k < containers.size() && c.container == "none"; ++k)
    for (int g = 0; g < b.G->order(); ++g)
      if (containers[k].contains(conjugate(H, g))) {
        c.container = kContainerNames[k];
        break;
      }
  c.h1_vanishes = h1(b.E, H).vanishes();
  c.permutation_h1_vanishes = h1(b.R, H).vanishes();
  IntMatrix FR = fixed_basis(b.R, H), FI = fixed_basis(b.I, H);
  if (FI.cols() == 0) {
    c.fixed_onto = true;
  } else {
    SolveResult sr = solve(FI, b.Psi.matrix() * FR);
    c.fixed_onto = sr && onto_full(*sr.x, FI.cols());
  }
  return c;
}

CoflabbyCertificate finish_coflabby(const DihedralBundle& b, std::vector<ResolutionCase> cases) {
  CoflabbyCertificate out;
  GLatticeMap inc(b.E, b.R, b.E_basis);
  out.exact = check_exact({inc, b.Psi}).exact;
  out.cases = std::move(cases);
  out.ok = out.exact;
  for (auto& c : out.cases) {
    if (!c.h1_vanishes && !c.fixed_onto)
      throw CaseFailed("coflabby resolution: neither condition holds for " + c.H.describe());
    if (c.container == "none") throw CaseFailed("coflabby resolution: no listed case contains " + c.H.describe());
    out.ok = out.ok && c.permutation_h1_vanishes;
  }
  return out;
}

std::vector<Int> column(const IntMatrix& A, std::size_t j) { return A.col(j); }

}  // namespace

std::vector<Int> ring_apply(const Subgroup& H, const GroupRingElement& u) {
  CosetSpace cs = coset_space(H);
  std::vector<Int> v(cs.size(), 0);
  for (std::size_t g = 0; g < u.size(); ++g)
    if (u[g] != 0) v[cs.coset_of[g]] += u[g];
  return v;
}

GroupRingElement ring_mul(const GroupPtr& G, const GroupRingElement& a, const GroupRingElement& b) {
  GroupRingElement c(G->order(), 0);
  for (int x = 0; x < G->order(); ++x) {
    if (a[x] == 0) continue;
    for (int y = 0; y < G->order(); ++y)
      if (b[y] != 0) c[G->mul(x, y)] += a[x] * b[y];
  }
  return c;
}

std::vector<Int> r_vector(const DihedralBundle& b, const GroupRingElement& a1, const GroupRingElement& a2, long a3) {
  std::vector<Int> v = ring_apply(trivial_subgroup(b.G), a1);
  std::vector<Int> w = ring_apply(b.Hs, a2);
  v.insert(v.end(), w.begin(), w.end());
  v.push_back(a3);
  return v;
}

std::vector<Int> cover_vector(const DihedralBundle& b, const std::vector<Int>& r) { return mat_vec(b.Psi_cover, r); }

DihedralBundle build_bundle(long m) {
  if (m < 1 || m % 2 == 0) throw EvenM("build_bundle: m must be odd and positive");
  DihedralBundle b;
  b.m = m;
  b.G = make_dihedral(2 * m);
  b.sigma = b.G->generators()[0];
  b.tau = b.G->generators()[1];
  const auto& G = b.G;
  b.Hs = Subgroup(G, {b.s(m)});
  b.Ht = Subgroup(G, {b.tau});

  b.R1 = regular_lattice(G);
  b.R2 = permutation_lattice(b.Hs);
  b.R3 = trivial_lattice(G);
  b.R = direct_sum({b.R1, b.R2, b.R3});
  b.cover = permutation_lattice(std::vector<Subgroup>{b.Hs, b.Ht});
  GLatticeMap aug = augmentation(std::vector<Subgroup>{b.Hs, b.Ht});
  b.I_basis = kernel_of(aug);
  b.I = sublattice(b.cover, b.I_basis);

  auto pair = [&](const GroupRingElement& u, const GroupRingElement& w) {
    std::vector<Int> v = ring_apply(b.Hs, u), x = ring_apply(b.Ht, w);
    v.insert(v.end(), x.begin(), x.end());
    return v;
  };
  auto e = [&](int g) { return unit(G, g); };
  const GroupRingElement one = e(0);
  std::vector<Int> w1 = pair(one, zero(G) - one);
  std::vector<Int> w2 = pair(one + e(b.s(2)), zero(G) - one - e(b.s(m)));
  GroupRingElement a = zero(G), n = zero(G);
  for (long i = 0; i < m; ++i) a = a + e(b.s(i));
  for (long i = 0; i < 2 * m; ++i) n = n + e(b.s(i));
  std::vector<Int> w3 = pair(ring_mul(G, a, one + e(b.tau)), zero(G) - n);

  b.Psi_cover = IntMatrix(b.cover.rank(), b.R.rank());
  b.Psi_cover.set_block(0, 0, orbit_columns(b.cover, trivial_subgroup(G), w1));
  b.Psi_cover.set_block(0, b.offset2(), orbit_columns(b.cover, b.Hs, w2));
  b.Psi_cover.set_block(0, b.offset3(), IntMatrix::column_vector(w3));
  IntMatrix P = left_inverse(b.I_basis) * b.Psi_cover;
  if (b.I_basis * P != b.Psi_cover) throw std::logic_error("build_bundle: Psi leaves the augmentation kernel");
  b.Psi = GLatticeMap(b.R, b.I, P);
  b.E_basis = kernel_of(b.Psi);
  b.E = sublattice(b.R, b.E_basis);

  GroupRingElement x2 = zero(G);
  long x3 = 0;
  if (m % 4 == 1) {
    for (long j = 1; j <= (m - 1) / 4; ++j) {
      long sg = (j % 2 == 1) ? 1 : -1;
      x2 = x2 + e(b.s(sg * (2 * j - 1))) + e(b.s(sg * 2 * j));
    }
    x3 = -1;
  } else {
    for (long j = 0; j <= (m - 3) / 4; ++j) {
      long sg = (j % 2 == 0) ? 1 : -1;
      x2 = x2 - e(b.s(sg * 2 * j)) - e(b.s(sg * (2 * j + 1)));
    }
    x3 = 1;
  }
  x2 = ring_mul(G, one + e(b.tau), x2);
  b.x1 = r_vector(b, one + e(b.st(m)), x2, x3);
  return b;
}

nlohmann::json ZfsjReport::to_json() const {
  json j{{"ok", ok},
         {"literal_ok", literal_ok},
         {"literal_residual", vec_json(literal_residual)},
         {"generation_ok", generation_ok},
         {"containment_ok", containment_ok},
         {"preimages", json::array()}};
  for (auto& p : preimages) j["preimages"].push_back(vec_json(p));
  return j;
}

ZfsjReport certify_zfsj(const DihedralBundle& b) {
  ZfsjData d = zfsj_data(b);
  ZfsjReport r;
  const int sm = b.s(b.m);
  auto check = [&](const std::vector<Int>& pre, const std::vector<Int>& target, const char* what) {
    if (!fixed_by(b.R, sm, pre)) throw IdentityFailed(std::string(what) + ": preimage not fixed by sigma^m");
    std::vector<Int> res = subtract(cover_vector(b, pre), target);
    if (!is_zero_vec(res))
      throw IdentityFailed(std::string(what) + ": residual " + IntMatrix::column_vector(res).transpose().to_string());
  };
  check(d.pre1, d.target1, "1 - s^(m-2)");
  check(d.pre2, d.target2, "1 - s^(m-2) t");
  r.literal_residual = subtract(cover_vector(b, d.pre2_literal), d.target2);
  r.literal_ok = is_zero_vec(r.literal_residual) && fixed_by(b.R, sm, d.pre2_literal);
  r.preimages = {d.pre1, d.pre2};

  // I_{m,0}: augmentation kernel of the first summand, padded.
  IntMatrix K0 = kernel_of(augmentation(b.Hs));
  IntMatrix I0(b.cover.rank(), K0.cols());
  I0.set_block(0, 0, K0);
  IntMatrix gens = IntMatrix::hstack(orbit_columns(b.cover, trivial_subgroup(b.G), d.target1),
                                     orbit_columns(b.cover, trivial_subgroup(b.G), d.target2));
  r.generation_ok = span_contains(gens, I0) && span_contains(I0, gens);
  IntMatrix image = b.Psi_cover * fixed_basis(b.R, b.Hs);
  r.containment_ok = span_contains(image, I0);
  r.ok = r.generation_ok && r.containment_ok;
  return r;
}

nlohmann::json CoflabbyCertificate::to_json() const {
  json j{{"exact", exact}, {"ok", ok}, {"cases", json::array()}};
  for (auto& c : cases)
    j["cases"].push_back(json{{"subgroup", c.H.describe()},
                              {"order", c.H.order()},
                              {"case", c.container},
                              {"h1_vanishes", c.h1_vanishes},
                              {"fixed_onto", c.fixed_onto},
                              {"permutation_h1_vanishes", c.permutation_h1_vanishes}});
  return j;
}

CoflabbyCertificate certify_coflabby_resolution(const DihedralBundle& b, int jobs) {
  auto subs = subgroups_up_to_conjugacy(b.G, SubgroupFilter::PrimePower);
  auto containers = case_containers(b);
  std::vector<ResolutionCase> cases(subs.size());
  const int n = static_cast<int>(subs.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) cases[i] = resolution_case(b, subs[i], containers);
  return finish_coflabby(b, std::move(cases));
}

CoflabbyCertificate certify_coflabby_resolution_serial(const DihedralBundle& b) {
  auto containers = case_containers(b);
  std::vector<ResolutionCase> cases;
  for (auto& H : subgroups_up_to_conjugacy(b.G, SubgroupFilter::PrimePower))
    cases.push_back(resolution_case(b, H, containers));
  return finish_coflabby(b, std::move(cases));
}

DiagramLemmaCheck check_diagram_lemma(const IntMatrix& f1, const IntMatrix& f2, const IntMatrix& f3) {
  DiagramLemmaCheck c;
  c.hypotheses = f1.rows() == f1.cols() && rank(f2) == f2.cols() && rank(f3) == f3.cols() && is_saturated(f2);
  c.conclusion = f1.rows() == f1.cols() && is_unimodular(f1);
  return c;
}

bool is_permutation_basis(const GLattice& M, const IntMatrix& B) {
  if (B.rows() != M.rank() || B.cols() != M.rank() || !is_unimodular(B)) return false;
  IntMatrix Bi = inverse_unimodular(B);
  for (auto& A : M.generator_actions()) {
    IntMatrix P = Bi * A * B;
    for (std::size_t j = 0; j < P.cols(); ++j) {
      int ones = 0;
      for (std::size_t i = 0; i < P.rows(); ++i) {
        if (P(i, j) == 1)
          ++ones;
        else if (P(i, j) != 0)
          return false;
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

nlohmann::json SplittingCertificate::to_json() const {
  return json{{"x1_in_E", x1_in_E},
              {"x1_fixed", x1_fixed},
              {"x1_orbit_free", x1_orbit_free},
              {"subgroup_split", subgroup_split},
              {"subgroup_decomposition", subgroup_decomposition},
              {"fixed_character_match", fixed_character_match},
              {"rank_E_fixed_s2", rank_E_fixed},
              {"rank_Q_fixed_s2", rank_Q_fixed},
              {"y0", vec_json(y0)},
              {"y1", vec_json(y1)},
              {"Xi", matrix_to_json(Xi.matrix())},
              {"Xi_onto", Xi_onto},
              {"F_basis", matrix_to_json(F_basis)},
              {"F_rank", F.rank()},
              {"F_divisors", [&] {
                 json a = json::array();
                 for (auto& d : F_divisors) a.push_back(d.get_str());
                 return a;
               }()},
              {"F_fixed_by_s2", F_fixed},
              {"F_diagram_lemma", json{{"hypotheses", F_lemma.hypotheses}, {"conclusion", F_lemma.conclusion}}},
              {"F_iso", F_iso ? matrix_to_json(F_iso->matrix()) : json(nullptr)},
              {"section", section ? matrix_to_json(section->matrix()) : json(nullptr)},
              {"theta", matrix_to_json(theta)},
              {"theta_ok", theta_ok},
              {"ok", ok}};
}

SplittingCertificate certify_invertibility_and_splitting(const DihedralBundle& b) {
  const auto& G = b.G;
  const long m = b.m;
  SplittingCertificate c;

  // x1 and its orbit.
  c.x1_in_E = is_zero_vec(cover_vector(b, b.x1));
  c.x1_fixed = fixed_by(b.R, b.st(m), b.x1);
  Subgroup Hx(G, {b.st(m)});
  c.x1_orbit_free = rank(orbit_columns(b.R, Hx, b.x1)) == static_cast<std::size_t>(2 * m);
  SolveResult xs = solve(b.E_basis, IntMatrix::column_vector(b.x1));
  if (!xs) throw GeneratorRecoveryFailed("x1 is not in E");
  const std::vector<Int> x1E = xs.x->col(0);

  // Over D^(m) = <s^2, t>: E -> Z[D^(m)] reads the R1 coordinates on the coset s^m D^(m).
  Subgroup D(G, {b.s(2), b.tau});
  Restriction resD = restrict(b.E, D);
  const SubgroupAsGroup& A = resD.sub;
  const GLattice& ED = resD.lattice;
  GLattice ZD = regular_lattice(A.group);
  CosetSpace csG = coset_space(trivial_subgroup(G));
  CosetSpace csD = coset_space(trivial_subgroup(A.group));
  IntMatrix proj(ZD.rank(), b.E.rank());
  for (std::size_t k = 0; k < b.E.rank(); ++k)
    for (int dl = 0; dl < A.group->order(); ++dl) {
      int g = G->mul(b.s(m), A.to_parent[dl]);
      proj(csD.coset_of[dl], k) = b.E_basis(csG.coset_of[g], k);
    }
  GLatticeMap pmap(ED, ZD, proj);
  IntMatrix Kp = kernel_of(pmap);
  GLattice Ep = sublattice(ED, Kp);
  c.subgroup_split = static_cast<bool>(split_exact(GLatticeMap(Ep, ED, Kp), pmap));
  GLattice ZDs = permutation_lattice(Subgroup(A.group, {A.from_parent[b.s(2)]}));
  auto ep_iso = find_isomorphism(ZDs, Ep);
  if (ep_iso) {
    IntMatrix orbit(b.E.rank(), csD.size());
    for (std::size_t k = 0; k < csD.size(); ++k) {
      std::vector<Int> w = mat_vec(b.E.action(A.to_parent[csD.reps[k]]), x1E);
      for (std::size_t i = 0; i < w.size(); ++i) orbit(i, k) = w[i];
    }
    IntMatrix Bmat = IntMatrix::hstack(Kp * ep_iso->matrix(), orbit);
    c.subgroup_decomposition = Bmat.rows() == Bmat.cols() && is_unimodular(Bmat);
  }

  // E^<s^2> and the generators y0, y1.
  Subgroup N2(G, {b.s(2)});
  FixedLattice FL = fixed_lattice(b.E, N2);
  c.rank_E_fixed = FL.lattice.rank();
  Subgroup Hsig(G, {b.sigma}), H3(G, {b.s(2), b.st(m)});
  GLattice T = permutation_lattice(std::vector<Subgroup>{Hsig, Subgroup(G, {b.s(2), b.st(1)})});
  c.fixed_character_match = permutation_character(T) == permutation_character(FL.lattice);
  auto fiso = c.fixed_character_match ? find_isomorphism(T, FL.lattice) : std::nullopt;
  if (!fiso) throw GeneratorRecoveryFailed("no isomorphism Z[G/<s>] + Z[G/<s^2, s t>] -> E^<s^2>");
  c.fixed_iso = *fiso;
  const std::size_t r0 = coset_space(Hsig).size();
  c.y0 = column(FL.inclusion * fiso->matrix(), 0);
  c.y1 = column(FL.inclusion * fiso->matrix(), r0);

  // Xi: Q -> E.
  std::vector<Subgroup> qsubs{Hx, Hsig, H3};
  c.Q = permutation_lattice(qsubs);
  c.rank_Q_fixed = fixed_basis(c.Q, N2).cols();
  std::vector<std::vector<Int>> targets{x1E, c.y0, c.y1};
  IntMatrix Xi(b.E.rank(), c.Q.rank());
  std::size_t off = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    IntMatrix cols = orbit_columns(b.E, qsubs[k], targets[k]);
    Xi.set_block(0, off, cols);
    off += cols.cols();
  }
  try {
    c.Xi = GLatticeMap(c.Q, b.E, Xi);
  } catch (const NotEquivariant&) {
    throw GeneratorRecoveryFailed("Xi is not equivariant: a generator image is not fixed by its stabilizer");
  }
  c.Xi_onto = onto_full(Xi, b.E.rank());
  if (!c.Xi_onto) throw GeneratorRecoveryFailed("Xi is not onto E");
  c.F_basis = kernel_of(c.Xi);
  c.F = sublattice(c.Q, c.F_basis);
  c.F_divisors = snf(c.F_basis).divisors;
  IntMatrix fF = fixed_basis(c.F, N2);
  c.F_fixed = fF.cols() == c.F.rank();
  c.F_lemma = check_diagram_lemma(fF, fixed_basis(c.Q, N2), FL.inclusion);
  c.F_iso = find_isomorphism(permutation_lattice(H3), c.F);

  SplitResult sr = split_exact(GLatticeMap(c.F, c.Q, c.F_basis), c.Xi);
  if (!sr) throw SplittingNotFound("0 -> F -> Q -> E -> 0 has no integral equivariant splitting");
  c.section = sr.section;
  if (c.F_iso) {
    c.theta = IntMatrix::hstack(c.section->matrix(), c.F_basis * c.F_iso->matrix());
    GLattice Et = direct_sum({b.E, permutation_lattice(H3)});
    c.theta_ok = c.theta.rows() == c.theta.cols() && is_unimodular(c.theta) && is_equivariant(Et, c.Q, c.theta);
  }
  c.ok = c.x1_in_E && c.x1_fixed && c.x1_orbit_free && c.subgroup_split && c.subgroup_decomposition &&
         c.fixed_character_match && c.Xi_onto && c.F.rank() == 2 && c.F_fixed && c.F_lemma.hypotheses &&
         c.F_lemma.conclusion && c.F_iso.has_value() && c.theta_ok;
  return c;
}

nlohmann::json QuasiPermutationCertificate::to_json() const {
  DihedralBundle b = build_bundle(m);
  json j{{"m", m},
         {"group", json{{"kind", "dihedral"}, {"n", 2 * m}}},
         {"multiset", json::array({b.Hs.describe(), b.Ht.describe()})},
         {"ranks", json{{"R", b.R.rank()}, {"I", b.I.rank()}, {"E", b.E.rank()}}},
         {"Psi", matrix_to_json(b.Psi.matrix())},
         {"E_basis", matrix_to_json(b.E_basis)},
         {"x1", vec_json(b.x1)},
         {"zfsj", zfsj.to_json()},
         {"coflabby", coflabby.to_json()},
         {"splitting", splitting.to_json()},
         {"tilde_exact", tilde_exact},
         {"dual_exact", dual_exact},
         {"R_dual_permutation", R_dual_permutation},
         {"E_dual_permutation", E_dual_permutation},
         {"E_dual_basis", matrix_to_json(E_dual_basis)},
         {"steps", json::array({"0 -> E -> R -> I -> 0 exact, Psi onto",
                                "coflabby: every prime-power subgroup has H^1(H, E) = 0 or R^H -> I^H onto",
                                "E (+) Z[G/<s^2, s^m t>] ~= Q via theta",
                                "dual sequence 0 -> J -> R~° -> E~° -> 0 with permutation flanks"})},
         {"notes", notes},
         {"ok", ok}};
  return j;
}

QuasiPermutationCertificate certify_nzf2(long m, int jobs) {
  QuasiPermutationCertificate q;
  q.m = m;
  DihedralBundle b = build_bundle(m);
  q.zfsj = certify_zfsj(b);
  q.coflabby = certify_coflabby_resolution(b, jobs);
  q.splitting = certify_invertibility_and_splitting(b);

  Subgroup H3(b.G, {b.s(2), b.st(m)});
  GLattice P3 = permutation_lattice(H3);
  GLattice Rt = direct_sum({b.R, P3}), Et = direct_sum({b.E, P3});
  IntMatrix inc = IntMatrix::block_diag(b.E_basis, IntMatrix::identity(P3.rank()));
  IntMatrix proj = IntMatrix::hstack(b.Psi.matrix(), IntMatrix(b.I.rank(), P3.rank()));
  q.tilde_exact = check_exact({GLatticeMap(Et, Rt, inc), GLatticeMap(Rt, b.I, proj)}).exact;
  GLattice J = dual(b.I), Rd = dual(Rt), Ed = dual(Et);
  q.dual_exact = check_exact({GLatticeMap(J, Rd, proj.transpose()), GLatticeMap(Rd, Ed, inc.transpose())}).exact;
  q.R_dual_permutation = is_permutation_basis(Rd, IntMatrix::identity(Rd.rank()));
  q.E_dual_basis = q.splitting.theta.transpose();
  q.E_dual_permutation = q.splitting.theta_ok && is_permutation_basis(Ed, q.E_dual_basis);

  if (!q.zfsj.literal_ok)
    q.notes.push_back("literal preimage formula for (1 - s^(m-2) t, 0) misses it; corrected preimage used");
  q.notes.push_back("y0, y1 recovered from a certified isomorphism Z[G/<s>] + Z[G/<s^2, s t>] -> E^<s^2>");
  q.notes.push_back("computed ranks: E^<s^2> = " + std::to_string(q.splitting.rank_E_fixed) +
                    ", Q^<s^2> = " + std::to_string(q.splitting.rank_Q_fixed) + ", F = " +
                    std::to_string(q.splitting.F.rank()));
  q.ok = q.zfsj.ok && q.coflabby.ok && q.splitting.ok && q.tilde_exact && q.dual_exact && q.R_dual_permutation &&
         q.E_dual_permutation;
  return q;
}

bool validate_certificate(const nlohmann::json& cert, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  try {
    const long m = cert.at("m").get<long>();
    DihedralBundle b = build_bundle(m);
    if (matrix_from_json(cert.at("Psi")) != b.Psi.matrix()) return fail("Psi differs from the rebuilt map");
    if (matrix_from_json(cert.at("E_basis")) != b.E_basis) return fail("E basis differs");
    if (vec_from_json(cert.at("x1")) != b.x1) return fail("x1 differs");

    ZfsjData d = zfsj_data(b);
    const auto& pre = cert.at("zfsj").at("preimages");
    if (pre.size() != 2) return fail("expected two preimages");
    std::vector<std::vector<Int>> targets{d.target1, d.target2};
    for (std::size_t k = 0; k < 2; ++k) {
      std::vector<Int> p = vec_from_json(pre[k]);
      if (!fixed_by(b.R, b.s(m), p) || cover_vector(b, p) != targets[k]) return fail("preimage check failed");
    }

    const auto& sp = cert.at("splitting");
    Subgroup Hx(b.G, {b.st(m)}), Hsig(b.G, {b.sigma}), H3(b.G, {b.s(2), b.st(m)});
    GLattice Q = permutation_lattice(std::vector<Subgroup>{Hx, Hsig, H3});
    IntMatrix Xi = matrix_from_json(sp.at("Xi"));
    if (!is_equivariant(Q, b.E, Xi) || !onto_full(Xi, b.E.rank())) return fail("Xi check failed");
    if (sp.at("section").is_null()) return fail("no section");
    IntMatrix s = matrix_from_json(sp.at("section"));
    if (!(Xi * s).is_identity() || !is_equivariant(b.E, Q, s)) return fail("section check failed");
    IntMatrix theta = matrix_from_json(sp.at("theta"));
    GLattice P3 = permutation_lattice(H3);
    GLattice Et = direct_sum({b.E, P3});
    if (theta.rows() != theta.cols() || !is_unimodular(theta) || !is_equivariant(Et, Q, theta))
      return fail("theta check failed");
    IntMatrix F = matrix_from_json(sp.at("F_basis"));
    if (!(Xi * F).is_zero() || F.cols() + b.E.rank() != Q.rank() || !is_saturated(F)) return fail("F check failed");

    IntMatrix Bd = matrix_from_json(cert.at("E_dual_basis"));
    if (!is_permutation_basis(dual(Et), Bd)) return fail("dual basis of E~ is not permuted");
    GLattice Rt = direct_sum({b.R, P3});
    IntMatrix inc = IntMatrix::block_diag(b.E_basis, IntMatrix::identity(P3.rank()));
    IntMatrix proj = IntMatrix::hstack(b.Psi.matrix(), IntMatrix(b.I.rank(), P3.rank()));
    if (!check_exact({GLatticeMap(dual(b.I), dual(Rt), proj.transpose()),
                      GLatticeMap(dual(Rt), dual(Et), inc.transpose())})
             .exact)
      return fail("dual sequence not exact");
    if (!cert.at("ok").get<bool>()) return fail("certificate records a failure");
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return true;
}

}  // namespace torus
