#include <doctest.h>

#include "torus/dihedral.hpp"
#include "torus/rationality.hpp"

using namespace torus;

TEST_CASE("bundle rejects even m") {
  CHECK_THROWS_AS(build_bundle(2), EvenM);
  CHECK_THROWS_AS(build_bundle(0), EvenM);
}

TEST_CASE("ranks of R, I, E") {
  for (long m : {1, 3, 5, 7}) {
    DihedralBundle b = build_bundle(m);
    CHECK(b.G->order() == 4 * m);
    CHECK(b.R.rank() == static_cast<std::size_t>(6 * m + 1));
    CHECK(b.I.rank() == static_cast<std::size_t>(4 * m - 1));
    CHECK(b.E.rank() == static_cast<std::size_t>(2 * m + 2));
  }
}

TEST_CASE("m = 1: E is spanned by (1 + st, -1) and s(1 + st, -1)") {
  DihedralBundle b = build_bundle(1);
  auto e = [&](int g) {
    GroupRingElement u(b.G->order(), 0);
    u[g] = 1;
    return u;
  };
  GroupRingElement zero(b.G->order(), 0);
  std::vector<Int> v = b.x1;
  GroupRingElement a = e(0);
  a[b.st(1)] += 1;
  std::vector<Int> w1 = r_vector(b, a, zero, -1);
  std::vector<Int> w2 = r_vector(b, ring_mul(b.G, e(b.sigma), a), zero, -1);
  CHECK(v == w1);
  IntMatrix W = IntMatrix::hstack(IntMatrix::column_vector(w1), IntMatrix::column_vector(w2));
  // For m = 1 the R2 summand Z[G/<s>] is rank 2, so E has rank 4; the two vectors lie in it.
  CHECK(span_contains(b.E_basis, W));
  CHECK(cover_vector(b, w1) == std::vector<Int>(b.cover.rank(), 0));
}

TEST_CASE("Psi is equivariant and onto") {
  for (long m : {1, 3, 5}) {
    DihedralBundle b = build_bundle(m);
    CHECK(is_equivariant(b.R, b.I, b.Psi.matrix()));
    SnfResult s = snf(b.Psi.matrix());
    CHECK(s.rank == b.I.rank());
    for (auto& d : s.divisors) CHECK(d == 1);
  }
}

TEST_CASE("x1 lies in E and is fixed by s^m t") {
  for (long m : {1, 3, 5, 7, 9}) {
    DihedralBundle b = build_bundle(m);
    CHECK(cover_vector(b, b.x1) == std::vector<Int>(b.cover.rank(), 0));
    CHECK(b.R.action(b.st(m)) * IntMatrix::column_vector(b.x1) == IntMatrix::column_vector(b.x1));
  }
}

TEST_CASE("generator identities") {
  for (long m : {1, 3, 5, 7, 9, 11}) {
    DihedralBundle b = build_bundle(m);
    ZfsjReport z = certify_zfsj(b);
    CAPTURE(m);
    CHECK(z.ok);
    CHECK(z.generation_ok);
    CHECK(z.containment_ok);
    CHECK(z.preimages.size() == 2);
    // The uncorrected preimage misses by N_s (1 - t) on the first summand; for m = 3 mod 4
    // the grouping of sigma^-1 adds s^-1 (t - 1) on top.
    CHECK_FALSE(z.literal_ok);
    long nonzero = 0;
    for (auto& x : z.literal_residual) nonzero += x != 0;
    CHECK(nonzero == (m % 4 == 1 ? 2 * m : 2 * m + 2));
  }
}

TEST_CASE("coflabby resolution, parallel and serial agree") {
  for (long m : {1, 3, 5}) {
    DihedralBundle b = build_bundle(m);
    CoflabbyCertificate par = certify_coflabby_resolution(b, 4);
    CoflabbyCertificate ser = certify_coflabby_resolution_serial(b);
    CAPTURE(m);
    CHECK(par.ok);
    CHECK(par.exact);
    CHECK(par.to_json() == ser.to_json());
    for (auto& c : par.cases) CHECK(c.container != "none");
  }
}

TEST_CASE("E is coflabby: H^1 vanishes on every prime-power subgroup") {
  DihedralBundle b = build_bundle(3);
  for (auto& c : certify_coflabby_resolution_serial(b).cases) CHECK(c.h1_vanishes);
}

TEST_CASE("invertibility and splitting") {
  for (long m : {1, 3, 5}) {
    DihedralBundle b = build_bundle(m);
    SplittingCertificate s = certify_invertibility_and_splitting(b);
    CAPTURE(m);
    CHECK(s.x1_in_E);
    CHECK(s.x1_fixed);
    CHECK(s.x1_orbit_free);
    CHECK(s.subgroup_split);
    CHECK(s.subgroup_decomposition);
    CHECK(s.fixed_character_match);
    CHECK(s.Xi_onto);
    CHECK(s.F.rank() == 2);
    CHECK(s.F_divisors == std::vector<Int>{1, 1});
    CHECK(s.F_fixed);
    CHECK(s.F_lemma.hypotheses);
    CHECK(s.F_lemma.conclusion);
    CHECK(s.F_iso.has_value());
    CHECK(s.theta_ok);
    CHECK(s.rank_E_fixed == 4);
    CHECK(s.rank_Q_fixed == 6);
    CHECK(s.ok);
  }
}

TEST_CASE("diagram lemma check") {
  IntMatrix inj = IntMatrix::from_rows({{1, 0}, {0, 1}, {0, 0}});
  CHECK(check_diagram_lemma(IntMatrix::identity(2), inj, inj).conclusion);
  DiagramLemmaCheck bad = check_diagram_lemma(IntMatrix::from_rows({{2, 0}, {0, 1}}), inj, inj);
  CHECK(bad.hypotheses);
  CHECK_FALSE(bad.conclusion);
  CHECK_FALSE(check_diagram_lemma(IntMatrix::identity(2), IntMatrix::from_rows({{2, 0}, {0, 1}}), inj).hypotheses);
}

TEST_CASE("permutation basis detection") {
  DihedralBundle b = build_bundle(1);
  CHECK(is_permutation_basis(b.R, IntMatrix::identity(b.R.rank())));
  CHECK_FALSE(is_permutation_basis(b.E, IntMatrix::identity(b.E.rank())));
}

TEST_CASE("quasi-permutation certificate agrees with the classifier") {
  for (long m : {1, 3, 5, 7}) {
    QuasiPermutationCertificate q = certify_nzf2(m, 2);
    CAPTURE(m);
    CHECK(q.ok);
    CHECK(q.tilde_exact);
    CHECK(q.dual_exact);
    CHECK(q.R_dual_permutation);
    CHECK(q.E_dual_permutation);
    GroupPtr G = make_dihedral(2 * m);
    int s = G->generators()[0], t = G->generators()[1];
    WeightedMultiset ms = WeightedMultiset::of({Subgroup(G, {G->power(s, m)}), Subgroup(G, {t})});
    Verdict v = classify(ms);
    CHECK(v.level == Level::QuasiPermutation);
  }
}

TEST_CASE("certificate round trip and tampering") {
  QuasiPermutationCertificate q = certify_nzf2(3, 1);
  nlohmann::json j = q.to_json();
  std::string why;
  CHECK(validate_certificate(nlohmann::json::parse(j.dump()), &why));
  CHECK(why.empty());
  CHECK(q.to_json().dump() == j.dump());

  nlohmann::json bad = j;
  IntMatrix theta = matrix_from_json(bad["splitting"]["theta"]);
  theta(0, 0) += 1;
  bad["splitting"]["theta"] = matrix_to_json(theta);
  CHECK_FALSE(validate_certificate(bad, &why));
  CHECK_FALSE(why.empty());

  nlohmann::json bad2 = j;
  bad2["m"] = 5;
  CHECK_FALSE(validate_certificate(bad2));
}
