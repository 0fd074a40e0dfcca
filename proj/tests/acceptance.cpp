// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [path/to/torusctl]

#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "support.hpp"
#include "torus/cohomology.hpp"
#include "torus/dihedral.hpp"
#include "torus/survey.hpp"

using namespace torus;
using json = nlohmann::json;

namespace {

// Pinned parameters. Every comparison below is exact; there is no numeric tolerance.
constexpr int kGcdInstances = 50;
constexpr int kGcdMaxOrder = 48;
constexpr unsigned kGcdSeed = 20240601;
constexpr int kH1RandomInstances = 200;
constexpr unsigned kH1Seed = 77;
constexpr std::size_t kH1RandomMaxRank = 8;
constexpr int kCatalogMaxOrder = 24;
constexpr std::size_t kCalculusMaxMembers = 3;
constexpr std::size_t kExhaustiveCap = 4000;  // larger groups: all pairs, sampled triples
constexpr std::size_t kSampledTriples = 1000;
constexpr unsigned kCalculusSeed = 4242;
constexpr int kParallelJobs = 4;
const std::vector<long> kDihedralM = {1, 3, 5, 7};

struct Outcome {
  bool pass = false;
  std::string summary;
  json record;  // compared across reruns
};

std::string fnv(const std::string& s) {
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

GroupPtr cyc(long n) { return make_cyclic(n); }
GroupPtr prod(std::vector<long> f) {
  std::vector<GroupPtr> fs;
  for (long x : f) fs.push_back(cyc(x));
  return make_product(fs);
}
GroupPtr alternating4() { return make_permutation_group(4, {{1, 2, 0, 3}, {1, 0, 3, 2}}); }
GroupPtr symmetric4() { return make_permutation_group(4, {{1, 2, 3, 0}, {1, 0, 2, 3}}); }
GroupPtr quaternion8() {
  // Left regular representation of Q8 on {1, i, j, k, -1, -i, -j, -k}.
  return make_permutation_group(8, {{1, 4, 3, 6, 5, 0, 7, 2}, {2, 7, 4, 1, 6, 3, 0, 5}});
}
GroupPtr dicyclic12() {
  return make_group(json::parse(
      R"({"kind":"semidirect","normal":{"kind":"cyclic","n":3},"quotient":{"kind":"cyclic","n":4},"action":[[0,"s^2"]]})"));
}
GroupPtr order60() {
  return make_group(json::parse(
      R"({"kind":"semidirect","normal":{"kind":"cyclic","n":15},"quotient":{"kind":"cyclic","n":4},
          "action":[[0,"s^2"]],"names":["s","t"]})"));
}
GroupPtr order315() {
  return make_group(json::parse(
      R"({"kind":"product","factors":[
            {"kind":"semidirect","normal":{"kind":"cyclic","n":35},"quotient":{"kind":"cyclic","n":3},
             "action":[[0,"s^16"]],"names":["s","t"]},
            {"kind":"cyclic","n":3}]})"));
}

Subgroup sub(const GroupPtr& G, std::vector<std::string> gens) {
  std::vector<int> ids;
  for (auto& g : gens) ids.push_back(G->parse_element(g));
  return Subgroup(G, ids);
}

std::vector<GroupPtr> abelian_and_dihedral_upto24() {
  std::vector<GroupPtr> gs;
  for (long n = 2; n <= kCatalogMaxOrder; ++n) gs.push_back(cyc(n));
  for (long n = 2; 2 * n <= kCatalogMaxOrder; ++n) gs.push_back(make_dihedral(n));
  for (auto f : std::vector<std::vector<long>>{{2, 2}, {2, 4}, {2, 2, 2}, {3, 3}, {2, 6}, {2, 8}, {4, 4},
                                              {2, 2, 4}, {2, 2, 2, 2}, {2, 10}, {3, 6}, {2, 12}, {2, 2, 6}})
    gs.push_back(prod(f));
  return gs;
}

std::vector<GroupPtr> catalog_upto24() {
  auto gs = abelian_and_dihedral_upto24();
  for (auto& G : {alternating4(), symmetric4(), quaternion8(), dicyclic12()}) gs.push_back(G);
  return gs;
}

std::string group_label(const GroupPtr& G) {
  std::string names;
  for (auto& n : G->generator_names()) names += n;
  return to_string(G->kind()) + "/" + std::to_string(G->order()) + "/" + names + "/" + std::to_string(G->param());
}

// ---------------------------------------------------------------- 1
Outcome criterion_gcd_one(int jobs) {
  std::vector<GroupPtr> pool = {cyc(6),  cyc(12), cyc(30),        make_dihedral(3), make_dihedral(6),
                                make_dihedral(15), make_dihedral(24), prod({2, 6}),  prod({4, 12}),
                                prod({2, 2, 6}),   alternating4(),    symmetric4(),  dicyclic12(),
                                make_product({cyc(2), symmetric4()}), make_product({cyc(3), quaternion8()})};
  std::mt19937 rng(kGcdSeed);
  std::vector<WeightedMultiset> inst;
  std::vector<std::vector<Subgroup>> subs(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (auto& H : all_subgroups(pool[i]))
      if (H.order() < pool[i]->order()) subs[i].push_back(H);
  while (static_cast<int>(inst.size()) < kGcdInstances) {
    std::size_t gi = rng() % pool.size();
    if (pool[gi]->order() > kGcdMaxOrder) continue;
    std::vector<Subgroup> m;
    std::size_t k = 1 + rng() % 3;
    for (std::size_t j = 0; j < k; ++j) m.push_back(subs[gi][rng() % subs[gi].size()]);
    WeightedMultiset ms = WeightedMultiset::of(m);
    if (d_of(ms) == 1) inst.push_back(ms);
  }
  const int n = static_cast<int>(inst.size());
  std::vector<json> rec(n);
  std::vector<char> ok(n, 0);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (int i = 0; i < n; ++i) {
    const WeightedMultiset& ms = inst[i];
    MultinormLattice I = build_I(ms);
    GLatticeMap eps = weighted_augmentation(ms);
    GLatticeMap inc(I.lattice, I.cover, I.inclusion);
    SplitResult sr = split_exact(inc, eps);
    bool good = sr.section.has_value();
    if (good) {
      const IntMatrix& j = sr.section->matrix();
      good = (eps.matrix() * j).is_identity() && is_equivariant(trivial_lattice(ms.group()), I.cover, j);
    }
    Verdict v = classify(ms);
    good = good && v.level == Level::StablyPermutation && v.section &&
           (eps.matrix() * v.section->matrix()).is_identity();
    ok[i] = good;
    rec[i] = json{{"group", group_label(ms.group())},
                  {"multiset", ms.describe()},
                  {"section", sr.section ? matrix_to_json(sr.section->matrix()) : json(nullptr)},
                  {"ok", good}};
  }
  int passed = 0;
  for (char c : ok) passed += c;
  Outcome o;
  o.pass = passed == kGcdInstances;
  o.summary = std::to_string(passed) + "/" + std::to_string(kGcdInstances) + " sections found and re-verified";
  o.record = rec;
  return o;
}

// ---------------------------------------------------------------- 2
Outcome criterion_regressions(int) {
  Outcome o;
  std::vector<std::string> fails;
  json rec = json::object();

  {
    auto G = order60();
    auto ms = WeightedMultiset::of({sub(G, {"s^3", "t^2"}), sub(G, {"t"})});
    Verdict v = classify(ms);
    bool cited = false;
    for (auto& s : v.trace)
      if (s.rule == "sylow-cyclic" && s.conclusion.find("D = {3}") != std::string::npos &&
          s.conclusion.find("P* = {5}") != std::string::npos)
        cited = true;
    if (v.level != Level::QuasiPermutation || !cited || !replay(v, G)) fails.push_back("order 60");
    rec["order60"] = v.to_json();
  }
  {
    auto G = make_product({cyc(30), cyc(2)});
    int s = G->generators()[0], t = G->generators()[1];
    Subgroup H1(G, {G->power(s, 3)}), H2(G, {G->power(s, 5)}), H3(G, {G->power(s, 2), t});
    Verdict v = classify(WeightedMultiset::of({H1, H2, H3}));
    bool reached = false;
    for (auto& st : v.trace)
      if (st.rule == "nilpotent-transfer" && st.conclusion.find("two members") != std::string::npos &&
          st.conclusion.find("dihedral of order 4") != std::string::npos)
        reached = true;
    if (v.level != Level::QuasiPermutation || !reached || !replay(v, G)) fails.push_back("C30 x C2");
    rec["c30xc2"] = v.to_json();
  }
  {
    auto G = order315();
    int s = G->generators()[0], t = G->generators()[1];
    Verdict v = classify(WeightedMultiset::of({Subgroup(G, {G->power(s, 5), t}), Subgroup(G, {G->power(s, 7), t})}));
    if (v.level == Level::NotQuasiInvertible || !is_quasi_invertible(v.level)) fails.push_back("order 315");
    rec["order315"] = v.to_json();
  }
  for (long n : {4, 8}) {
    auto D = make_dihedral(n);
    Verdict v = classify(WeightedMultiset::of({sub(D, {"t"}), sub(D, {"s*t"})}));
    if (v.level != Level::QuasiPermutation) fails.push_back("D" + std::to_string(n) + " reflection pair");
    rec["reflections_D" + std::to_string(n)] = v.to_json();
  }
  o.pass = fails.empty();
  o.summary = o.pass ? "5/5 verdicts match" : "mismatch: " + json(fails).dump();
  o.record = rec;
  return o;
}

// ---------------------------------------------------------------- 3
Outcome criterion_dihedral(int jobs) {
  Outcome o;
  json rec = json::array();
  int good = 0;
  for (long m : kDihedralM) {
    bool ok = false;
    std::string err;
    json cert;
    try {
      QuasiPermutationCertificate q = certify_nzf2(m, jobs);
      cert = q.to_json();
      std::string why;
      bool valid = validate_certificate(cert, &why);
      GroupPtr G = make_dihedral(2 * m);
      int s = G->generators()[0], t = G->generators()[1];
      WeightedMultiset ms = WeightedMultiset::of({Subgroup(G, {G->power(s, m)}), Subgroup(G, {t})});
      Level ld = classify_dihedral(ms).level;
      bool cases = true;
      for (auto& c : q.coflabby.cases) cases = cases && (c.h1_vanishes || c.fixed_onto);
      ok = q.ok && q.coflabby.exact && cases && q.splitting.F.rank() == 2 &&
           q.splitting.F_divisors == std::vector<Int>{1, 1} && q.splitting.section.has_value() && q.dual_exact &&
           q.R_dual_permutation && q.E_dual_permutation && valid && ld == Level::QuasiPermutation;
      if (!valid) err = why;
    } catch (const std::exception& e) {
      err = e.what();
    }
    good += ok;
    rec.push_back(json{{"m", m}, {"ok", ok}, {"certificate", fnv(cert.dump())}, {"error", err}});
  }
  o.pass = good == static_cast<int>(kDihedralM.size());
  o.summary = std::to_string(good) + "/" + std::to_string(kDihedralM.size()) +
              " certificates (m = 1, 3, 5, 7) assembled, re-validated, classifier agrees";
  o.record = rec;
  return o;
}

// ---------------------------------------------------------------- 4
Outcome criterion_cohomology(int jobs) {
  Outcome o;
  std::vector<std::string> fails;
  json rec = json::object();

  auto C2 = cyc(2);
  auto sign = character_lattice(C2, {-1});
  auto hs = h1(sign, whole_group(C2));
  if (hs.invariant_factors != std::vector<Int>{2}) fails.push_back("sign");
  rec["sign"] = hs.to_json();

  std::size_t perm_cases = 0;
  json perm = json::array();
  for (auto& G : catalog_upto24()) {
    for (auto& K : subgroups_up_to_conjugacy(G, SubgroupFilter::All)) {
      CoflabbyReport r = coflabby_report(permutation_lattice(K), SubgroupFilter::All, jobs);
      perm_cases += r.table.size();
      if (!r.coflabby) fails.push_back("Z[G/K] " + group_label(G) + " " + K.describe());
    }
    perm.push_back(group_label(G));
  }
  rec["permutation_groups"] = perm;
  rec["permutation_cases"] = perm_cases;

  json aug = json::array();
  for (long n = 1; n <= 12; ++n) {
    auto C = cyc(n);
    auto r = h1(kernel_lattice(augmentation(trivial_subgroup(C))), whole_group(C));
    std::vector<Int> want = n == 1 ? std::vector<Int>{} : std::vector<Int>{Int(n)};
    if (r.invariant_factors != want) fails.push_back("augmentation ideal n=" + std::to_string(n));
    aug.push_back(r.to_json());
  }
  rec["augmentation"] = aug;

  std::mt19937 rng(kH1Seed);
  auto cat = catalog_upto24();
  struct Inst {
    GLattice M;
    Subgroup H;
  };
  std::vector<Inst> inst;
  while (static_cast<int>(inst.size()) < kH1RandomInstances) {
    auto G = cat[rng() % cat.size()];
    std::vector<Subgroup> cyclic;
    for (auto& H : all_subgroups(G))
      if (is_cyclic(H)) cyclic.push_back(H);
    Subgroup H = cyclic[rng() % cyclic.size()];
    inst.push_back(Inst{torus::testing::random_lattice(rng, G, kH1RandomMaxRank), H});
  }
  const int n = static_cast<int>(inst.size());
  std::vector<json> cmp(n);
  std::vector<char> agree(n, 0);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (int i = 0; i < n; ++i) {
    auto a = h1_cyclic(inst[i].M, inst[i].H), b = h1_presentation(inst[i].M, inst[i].H);
    agree[i] = a.invariant_factors == b.invariant_factors;
    cmp[i] = json{{"rank", inst[i].M.rank()}, {"H", inst[i].H.describe()}, {"h1", a.to_json()}};
  }
  int same = 0;
  for (char c : agree) same += c;
  if (same != kH1RandomInstances) fails.push_back("cyclic vs presentation " + std::to_string(same));
  rec["random"] = cmp;

  o.pass = fails.empty();
  o.summary = o.pass ? "sign Z/2; " + std::to_string(perm_cases) + " permutation cases vanish; Z/n for n <= 12; " +
                           std::to_string(same) + "/" + std::to_string(kH1RandomInstances) + " methods agree"
                     : "failures: " + json(fails).dump();
  o.record = rec;
  return o;
}

// ---------------------------------------------------------------- 5
struct Direct {
  std::vector<IntMatrix> source, target;
};

bool witness_matches(const IntMatrix& W, const Direct& d) {
  if (d.source.size() != d.target.size()) return false;
  std::size_t rs = d.source.empty() ? 0 : d.source[0].rows(), rt = d.target.empty() ? 0 : d.target[0].rows();
  if (rs != rt) return false;
  if (rs == 0) return true;
  if (W.rows() != rt || W.cols() != rs) return false;
  Int det = determinant(W);
  if (det != 1 && det != -1) return false;
  for (std::size_t k = 0; k < d.source.size(); ++k)
    if (d.target[k] * W != W * d.source[k]) return false;
  return true;
}

std::vector<IntMatrix> actions_or_empty(const GLattice& M, std::size_t gens) {
  if (M.rank() == 0) return std::vector<IntMatrix>(gens, IntMatrix(0, 0));
  return M.generator_actions();
}

// I(after) (+) Z[G/S_1] (+) ..., built from scratch.
std::vector<IntMatrix> split_target(const WeightedMultiset& after, const std::vector<Subgroup>& summands) {
  const GroupPtr& G = after.group();
  std::vector<GLattice> parts;
  GLattice Ia = build_I(after).lattice;
  if (Ia.rank()) parts.push_back(Ia);
  for (auto& S : summands) parts.push_back(permutation_lattice(S));
  if (parts.empty()) return std::vector<IntMatrix>(G->generators().size(), IntMatrix(0, 0));
  return direct_sum(parts).generator_actions();
}

struct CalcResult {
  int asserted = 0, verified = 0;
  std::string digest;
};

CalcResult calculus_instance(const WeightedMultiset& ms, std::size_t idx, const std::vector<Subgroup>& sylows,
                             const std::vector<Subgroup>& normals) {
  CalcResult r;
  const GroupPtr& G = ms.group();
  const std::size_t ng = G->generators().size();
  GLattice I = build_I(ms).lattice;
  std::vector<IntMatrix> src = actions_or_empty(I, ng);
  std::string dig;
  auto record = [&](bool ok, const IntMatrix& W) {
    ++r.asserted;
    r.verified += ok;
    dig += (ok ? "1" : "0") + matrix_to_json(W).dump();
  };

  Reduction a = remove_dominated(ms);
  record(witness_matches(a.witness.matrix, Direct{src, split_target(a.after, a.summands)}), a.witness.matrix);
  Reduction b = reduce_srd(ms);
  record(witness_matches(b.witness.matrix, Direct{src, split_target(b.after, b.summands)}), b.witness.matrix);

  if (!sylows.empty()) {
    const Subgroup& P = sylows[idx % sylows.size()];
    RestrictedMultiset rm = restrict_multiset(ms, P);
    std::vector<IntMatrix> rsrc;
    for (int g : rm.sub.group->generators())
      rsrc.push_back(I.rank() ? I.action(rm.sub.to_parent[g]) : IntMatrix(0, 0));
    GLattice It = build_I(rm.mset).lattice;
    long lhs = 0, rhs = 0;
    for (auto& H : ms.expanded()) lhs += G->order() / H.order();
    for (auto& H : rm.mset.expanded()) rhs += P.order() / H.order();
    record(lhs == rhs && witness_matches(rm.witness.matrix,
                                         Direct{rsrc, actions_or_empty(It, rm.sub.group->generators().size())}),
           rm.witness.matrix);
  }

  const Subgroup& N = normals[idx % normals.size()];
  QuotientMultiset qm = quotient_multiset(ms, N);
  const GroupPtr& Q = qm.quotient.Q;
  std::vector<IntMatrix> qsrc;
  IntMatrix B = I.rank() ? fixed_basis(I, N) : IntMatrix(0, 0);
  for (int x : Q->generators()) {
    int g = 0;
    while (qm.quotient.proj[g] != x) ++g;
    if (B.cols() == 0) {
      qsrc.push_back(IntMatrix(0, 0));
      continue;
    }
    SolveResult s = solve(B, I.action(g) * B);
    qsrc.push_back(s ? *s.x : IntMatrix(0, 0));
  }
  GLattice Iq = build_I(qm.mset).lattice;
  record(witness_matches(qm.witness.matrix, Direct{qsrc, actions_or_empty(Iq, Q->generators().size())}),
         qm.witness.matrix);
  r.digest = fnv(dig);
  return r;
}

std::vector<WeightedMultiset> calculus_multisets(const GroupPtr& G) {
  auto cls = subgroups_up_to_conjugacy(G, SubgroupFilter::All);
  const std::size_t n = cls.size();
  std::vector<std::vector<std::size_t>> picks;
  for (std::size_t i = 0; i < n; ++i) {
    picks.push_back({i});
    for (std::size_t j = i; j < n; ++j) picks.push_back({i, j});
  }
  const std::size_t triples = n * (n + 1) * (n + 2) / 6;
  if (kCalculusMaxMembers >= 3) {
    if (n + n * (n + 1) / 2 + triples <= kExhaustiveCap) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
          for (std::size_t k = j; k < n; ++k) picks.push_back({i, j, k});
    } else {
      std::mt19937 rng(kCalculusSeed + static_cast<unsigned>(G->order()) * 31 + static_cast<unsigned>(n));
      std::set<std::vector<std::size_t>> seen;
      while (seen.size() < kSampledTriples) {
        std::vector<std::size_t> t{rng() % n, rng() % n, rng() % n};
        std::sort(t.begin(), t.end());
        seen.insert(t);
      }
      picks.insert(picks.end(), seen.begin(), seen.end());
    }
  }
  std::vector<WeightedMultiset> out;
  for (auto& p : picks) {
    std::vector<Subgroup> m;
    for (auto i : p) m.push_back(cls[i]);
    out.push_back(WeightedMultiset::of(m));
  }
  return out;
}

Outcome criterion_calculus(int jobs) {
  Outcome o;
  json rec = json::array();
  long asserted = 0, verified = 0, instances = 0, sampled_groups = 0;
  for (auto& G : abelian_and_dihedral_upto24()) {
    auto sets = calculus_multisets(G);
    std::vector<Subgroup> sylows, normals;
    for (long p : prime_factors(G->order())) sylows.push_back(sylow(G, p));
    for (auto& H : subgroups_up_to_conjugacy(G, SubgroupFilter::All))
      if (is_normal(H)) normals.push_back(H);
    const std::size_t ncls = subgroups_up_to_conjugacy(G, SubgroupFilter::All).size();
    if (ncls + ncls * (ncls + 1) / 2 + ncls * (ncls + 1) * (ncls + 2) / 6 > kExhaustiveCap) ++sampled_groups;
    const int n = static_cast<int>(sets.size());
    std::vector<CalcResult> res(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int i = 0; i < n; ++i) res[i] = calculus_instance(sets[i], i, sylows, normals);
    long a = 0, v = 0;
    std::string dig;
    for (auto& r : res) {
      a += r.asserted;
      v += r.verified;
      dig += r.digest;
    }
    asserted += a;
    verified += v;
    instances += n;
    rec.push_back(json{{"group", group_label(G)}, {"multisets", n}, {"asserted", a}, {"verified", v},
                       {"digest", fnv(dig)}});
  }
  o.pass = asserted == verified && asserted > 0;
  o.summary = std::to_string(verified) + "/" + std::to_string(asserted) + " isomorphisms carry verified witnesses (" +
              std::to_string(instances) + " multisets, " + std::to_string(rec.size()) + " groups, triples sampled on " +
              std::to_string(sampled_groups) + ")";
  o.record = rec;
  return o;
}

// ---------------------------------------------------------------- 6
Outcome criterion_negative(int) {
  Outcome o;
  std::vector<std::string> fails;
  json rec = json::object();
  auto D4 = make_dihedral(4);
  try {
    Verdict v = classify(WeightedMultiset::of({sub(D4, {"s"}), sub(D4, {"t"})}));
    if (v.level != Level::NotQuasiInvertible) fails.push_back("{<s>, <t>}");
    rec["s_t"] = v.to_json();

    auto sq = WeightedMultiset::of({sub(D4, {"s^2"})});
    DihedralMatch m = dihedral_case_match(sq);
    Verdict vd = classify_dihedral(sq);
    if (m.label || vd.level != Level::NotQuasiInvertible) fails.push_back("{<s^2>} case match");
    SylowTest st = sylow_test(sq, 2);
    Verdict vs = classify(sq);
    bool via_sylow = false;
    for (auto& s : vs.trace)
      if (s.rule == "qi-decision" && s.conclusion.find("not quasi-invertible") != std::string::npos) via_sylow = true;
    if (st.qi || vs.level != Level::NotQuasiInvertible || !via_sylow) fails.push_back("{<s^2>} Sylow pipeline");
    rec["s2_match"] = json{{"d", m.d}, {"label", m.label ? json(*m.label) : json(nullptr)}};
    rec["s2_dihedral"] = vd.to_json();
    rec["s2_sylow"] = vs.to_json();
  } catch (const InternalContradiction& e) {
    fails.push_back(std::string("contradiction guard fired: ") + e.what());
  }
  o.pass = fails.empty();
  o.summary = o.pass ? "D4 {<s>,<t>} and D4 {<s^2>} not quasi-invertible by both routes, guard silent"
                     : "failures: " + json(fails).dump();
  o.record = rec;
  return o;
}

using Criterion = Outcome (*)(int);
const std::vector<std::pair<std::string, Criterion>> kCriteria = {
    {"C1 gcd-1 splitting", criterion_gcd_one},          {"C2 example regressions", criterion_regressions},
    {"C3 dihedral certification", criterion_dihedral},  {"C4 cohomology oracles", criterion_cohomology},
    {"C5 calculus soundness", criterion_calculus},      {"C6 negative controls", criterion_negative}};

// ---------------------------------------------------------------- 7 (CLI part)
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool cli_determinism(const std::string& tool, std::string& detail) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("torus_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream(dir / "job.json") << R"({"group": {"kind":"semidirect","normal":{"kind":"cyclic","n":15},
      "quotient":{"kind":"cyclic","n":4},"action":[[0,"s^2"]],"names":["s","t"]},
      "multiset": [{"generators": ["s^3","t^2"]}, {"generators": ["t"]}]})";
    std::ofstream(dir / "lattice.json") << R"({"group": {"kind":"dihedral","n":6},
      "multiset": [{"generators": ["s^3"]}, {"generators": ["t"]}], "side": "J"})";
  }
  auto run = [&](const std::string& args, const std::string& out) {
    std::string cmd = "\"" + tool + "\" " + args + " > \"" + (dir / out).string() + "\" 2>/dev/null";
    return std::system(cmd.c_str());
  };
  const std::string j = std::to_string(kParallelJobs);
  const std::string job = "\"" + (dir / "job.json").string() + "\"";
  const std::string lat = "\"" + (dir / "lattice.json").string() + "\"";
  struct Pair {
    std::string name, a, b;
  };
  std::vector<Pair> pairs = {
      {"classify rerun", "classify -i " + job, "classify -i " + job},
      {"survey jobs", "survey --group '{\"kind\":\"dihedral\",\"n\":8}' --max-members 2 --jobs 1",
       "survey --group '{\"kind\":\"dihedral\",\"n\":8}' --max-members 2 --jobs " + j},
      {"verify-dihedral jobs", "verify-dihedral --m 5 --jobs 1 --format json",
       "verify-dihedral --m 5 --jobs " + j + " --format json"},
      {"cohomology-table jobs", "cohomology-table -i " + lat + " --jobs 1", "cohomology-table -i " + lat + " --jobs " + j}};
  bool ok = true;
  for (auto& p : pairs) {
    int ra = run(p.a, "a.out"), rb = run(p.b, "b.out");
    std::string A = slurp(dir / "a.out"), B = slurp(dir / "b.out");
    if (ra != 0 || rb != 0 || A.empty() || A != B) {
      ok = false;
      detail += " " + p.name;
    }
  }
  fs::remove_all(dir);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? argv[1] : "";
  bool all = true;
  std::vector<json> first, second, parallel;
  for (auto& [name, fn] : kCriteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn(1);
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.summary.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
    first.push_back(o.record);
  }

  // 7: rerun with one worker, then with several; every record must be byte-identical.
  std::vector<std::string> drift;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    std::string a = first[i].dump();
    std::string b, c;
    try {
      b = kCriteria[i].second(1).record.dump();
      c = kCriteria[i].second(kParallelJobs).record.dump();
    } catch (const std::exception& e) {
      b = c = std::string("exception: ") + e.what();
    }
    if (a != b) drift.push_back(kCriteria[i].first.substr(0, 2) + " rerun");
    if (a != c) drift.push_back(kCriteria[i].first.substr(0, 2) + " jobs " + std::to_string(kParallelJobs));
  }
  std::string cli_detail;
  bool cli_ok = true;
  if (!tool.empty()) cli_ok = cli_determinism(tool, cli_detail);
  bool det = drift.empty() && cli_ok;
  std::string summary = det ? "C1-C6 records identical across reruns and --jobs 1 vs " + std::to_string(kParallelJobs)
                            : "drift:" + json(drift).dump() + cli_detail;
  if (!tool.empty() && det) summary += "; CLI outputs identical";
  if (tool.empty()) summary += "; CLI not checked (no torusctl path given)";
  std::printf("[%s] C7 determinism: %s\n", det ? "PASS" : "FAIL", summary.c_str());
  all = all && det;
  return all ? 0 : 1;
}
