#include "torus/rationality.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace torus {

namespace {

using json = nlohmann::json;

long index_of(const Subgroup& H) { return H.group()->order() / H.order(); }

std::string set_text(const std::vector<Subgroup>& set) {
  std::string s = "{";
  for (std::size_t i = 0; i < set.size(); ++i) s += (i ? ", " : "") + set[i].describe();
  return s + "}";
}

std::string primes_text(const std::vector<long>& ps) {
  std::string s = "{";
  for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? ", " : "") + std::to_string(ps[i]);
  return s + "}";
}

json snapshot(const WeightedMultiset& ms) { return json{{"multiset", ms.to_json()}}; }

WeightedMultiset ms_from(const GroupPtr& G, const json& input) {
  return WeightedMultiset::from_json(G, input.at("multiset"));
}

std::vector<Subgroup> globalize_all(const SubgroupAsGroup& A, const std::vector<Subgroup>& v) {
  std::vector<Subgroup> out;
  for (auto& K : v) out.push_back(globalize(A, K));
  return out;
}

// Reduced set of the restriction to P, as subgroups of P's own group.
std::vector<Subgroup> local_reduced(const WeightedMultiset& ms, const SubgroupAsGroup& A, long p) {
  WeightedMultiset R = restricted_members(ms, A);
  return p == 2 ? srd_members(R) : reduce_red(R).underlying_set();
}

struct PGroupCriterion {
  bool qi = false;
  std::string text;
  Subgroup core;
};

// set: reduced (p odd) or strongly reduced (p = 2) over a p-group.
PGroupCriterion p_group_criterion(const std::vector<Subgroup>& set, long p) {
  PGroupCriterion out;
  out.core = multiset_core(set);
  Quotient q = quotient_group(out.core);
  const long k = q.Q->order();
  if (set.size() == 1) {
    out.qi = is_cyclic(whole_group(q.Q));
    out.text = std::string("one member, quotient by the core ") + (out.qi ? "cyclic" : "not cyclic") + " of order " +
               std::to_string(k);
    return out;
  }
  if (p == 2 && set.size() == 2) {
    Subgroup a = q.image(set[0]), b = q.image(set[1]);
    out.qi = a.order() == 2 && b.order() == 2 && join(a, b).order() == k;
    out.text = out.qi ? "two members whose images are involutions generating the quotient (dihedral of order " +
                            std::to_string(k) + ")"
                      : "two members whose images do not form a generating pair of involutions (quotient order " +
                            std::to_string(k) + ")";
    return out;
  }
  out.text = std::to_string(set.size()) + " members" + (p == 2 ? "" : " for an odd prime");
  return out;
}

// tau -> sigma tau, sigma fixed.
std::vector<int> dihedral_flip(const GroupPtr& G, int s, int t) {
  std::vector<int> f(G->order(), -1);
  const long n = G->element_order(s);
  const int st = G->mul(s, t);
  for (long k = 0; k < n; ++k) {
    int r = G->power(s, k);
    f[r] = r;
    f[G->mul(r, t)] = G->mul(r, st);
  }
  return f;
}

Subgroup apply_map(const Subgroup& H, const std::vector<int>& f) {
  std::vector<int> gens;
  for (int g : H.generators()) gens.push_back(f[g]);
  return Subgroup(H.group(), gens);
}

std::vector<Subgroup> sylow2_picture(const std::vector<Subgroup>& set, const SubgroupAsGroup& A) {
  std::vector<Subgroup> pic;
  for (auto& K : srd_members(restricted_members(WeightedMultiset::of(set), A)))
    pic.push_back(globalize(A, conjugacy_class_min(K)));
  std::sort(pic.begin(), pic.end());
  return pic;
}

struct Candidate {
  std::string label;
  std::vector<Subgroup> members;
};

std::vector<Candidate> dihedral_candidates(const GroupPtr& G, int s, int t, long d) {
  std::vector<Candidate> raw;
  auto S = [&](std::vector<int> gens) { return Subgroup(G, std::move(gens)); };
  const int sd = G->power(s, d);
  if (d % 4 == 2) {
    const int sh = G->power(s, d / 2);
    raw.push_back({"a", {S({sh})}});
    raw.push_back({"b", {S({sd, t})}});
    raw.push_back({"c", {S({sh}), S({sd, t})}});
  }
  raw.push_back({"d", {S({sd, t}), S({sd, G->mul(s, t)})}});
  std::vector<Candidate> out;
  for (auto& c : raw) {
    bool proper = std::all_of(c.members.begin(), c.members.end(),
                              [&](const Subgroup& H) { return H.order() < G->order(); });
    if (!proper) continue;
    if (d_of(WeightedMultiset::of(c.members)) != d) continue;
    out.push_back(c);
  }
  return out;
}

// ---- rules ----

RuleResult rule_weights(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  Reduction r = remove_dominated(ms);
  RuleResult out;
  out.data = {{"multiset", r.after.to_json()}, {"unweighted", r.after.is_unweighted()}};
  out.conclusion = "split off " + std::to_string(r.summands.size()) + " permutation summand(s); remaining " +
                   r.after.describe() + (r.after.is_unweighted() ? "" : " (still weighted)");
  return out;
}

RuleResult rule_weighted_generic(const GroupPtr& G, const json& in) {
  (void)ms_from(G, in);
  RuleResult out;
  Level l = all_sylow_cyclic(G) ? Level::QuasiInvertibleQPUnknown : Level::Unknown;
  out.data = {{"level", to_string(l)}};
  out.conclusion = all_sylow_cyclic(G) ? "all Sylow subgroups cyclic: quasi-invertible, quasi-permutation open"
                                       : "weights remain and no rule applies";
  return out;
}

RuleResult rule_gcd_one(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  const long d = d_of(ms);
  RuleResult out;
  out.data = {{"applies", d == 1}, {"d", d}};
  if (d != 1) {
    out.conclusion = "d = " + std::to_string(d) + ", rule does not apply";
    return out;
  }
  SplitResult sr = find_section(weighted_augmentation(ms));
  if (!sr) throw InternalContradiction("gcd of indices is 1 but the augmentation has no section");
  out.data["section"] = matrix_to_json(sr.section->matrix());
  out.conclusion = "d = 1: the augmentation splits, stably permutation";
  return out;
}

RuleResult rule_sylow(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  SylowTest st = sylow_test(ms, in.at("p").get<long>(), in.value("conjugator", 0));
  RuleResult out;
  out.data = {{"qi", st.qi}};
  out.conclusion = "p = " + std::to_string(st.p) + ", P = " + st.P.describe() + " of order " +
                   std::to_string(st.P.order()) + ", reduced " + set_text(st.reduced) + ": " + st.criterion + ", " +
                   (st.qi ? "passes" : "fails");
  return out;
}

RuleResult rule_qi_decision(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  const int c = in.value("conjugator", 0);
  std::vector<long> failing;
  for (long p : prime_set(ms))
    if (!sylow_test(ms, p, c).qi) failing.push_back(p);
  RuleResult out;
  out.data = {{"qi", failing.empty()}};
  out.conclusion = failing.empty() ? "every prime dividing d passes: quasi-invertible"
                                   : "fails at primes " + primes_text(failing) + ": not quasi-invertible";
  return out;
}

RuleResult rule_special_d2(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  std::vector<Subgroup> red = reduce_red(ms).underlying_set();
  RuleResult out;
  bool applies = d_of(ms) == 2 && red.size() >= 2;
  bool obstructs = false;
  std::string why = "rule does not apply";
  if (applies && red.size() == 2) {
    bool four = std::any_of(red.begin(), red.end(), [](const Subgroup& H) { return index_of(H) % 4 == 0; });
    bool sp = is_special(red);
    obstructs = sp && four;
    why = std::string("two members, ") + (sp ? "special" : "not special") +
          (four ? ", an index divisible by 4" : ", no index divisible by 4");
  } else if (applies) {
    auto sub = find_special_subset(red, 3);
    obstructs = sub.has_value();
    why = obstructs ? "special triple " + set_text(*sub) : "no special triple";
  }
  out.data = {{"applies", applies}, {"not_qi", obstructs}};
  out.conclusion = why + (obstructs ? ": not quasi-invertible" : ": no obstruction");
  return out;
}

RuleResult rule_special_d3(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  std::vector<Subgroup> red = reduce_red(ms).underlying_set();
  RuleResult out;
  bool applies = d_of(ms) >= 3 && red.size() >= 2;
  std::optional<std::vector<Subgroup>> pair;
  if (applies) pair = find_special_subset(red, 2);
  out.data = {{"applies", applies}, {"not_qi", pair.has_value()}};
  out.conclusion = !applies ? "rule does not apply"
                   : pair   ? "special pair " + set_text(*pair) + ": not quasi-invertible"
                            : "no special pair: no obstruction";
  return out;
}

RuleResult rule_sylow_cyclic(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  RuleResult out;
  if (!all_sylow_cyclic(G)) {
    out.data = {{"applies", false}};
    out.conclusion = "some Sylow subgroup is not cyclic";
    return out;
  }
  std::vector<long> D = prime_set(ms), Pstar = p_star_set(G), both;
  std::set_intersection(D.begin(), D.end(), Pstar.begin(), Pstar.end(), std::back_inserter(both));
  out.data = {{"applies", true}, {"qp", both.empty()}};
  out.conclusion = "D = " + primes_text(D) + ", P* = " + primes_text(Pstar) +
                   (both.empty() ? ", disjoint: quasi-permutation" : ", meet: quasi-invertible, not quasi-permutation");
  return out;
}

RuleResult rule_dihedral(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  DihedralMatch m = dihedral_case_match(ms);
  RuleResult out;
  out.data = {{"label", m.label ? json(*m.label) : json(nullptr)}, {"via_automorphism", m.via_automorphism}};
  if (m.label && *m.label == "odd")
    out.conclusion = "d = " + std::to_string(m.d) + " odd: quasi-permutation";
  else if (m.label)
    out.conclusion = "d = " + std::to_string(m.d) + ", 2-Sylow picture " + set_text(m.picture) + " matches case (" +
                     *m.label + ")" + (m.via_automorphism ? " after tau -> sigma tau" : "") + ": quasi-permutation";
  else
    out.conclusion = "d = " + std::to_string(m.d) + ", 2-Sylow picture " + set_text(m.picture) +
                     " matches no case: not quasi-invertible";
  return out;
}

RuleResult rule_p_group(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  long p = 0;
  RuleResult out;
  if (!is_p_group(whole_group(G), &p) || G->order() == 1) {
    out.data = {{"applies", false}};
    out.conclusion = "not a p-group";
    return out;
  }
  bool qi = sylow_test(ms, p).qi;
  out.data = {{"applies", true}, {"qp", qi}};
  out.conclusion = std::to_string(p) + "-group: quasi-permutation iff quasi-invertible, " +
                   (qi ? "quasi-permutation" : "not quasi-invertible");
  return out;
}

RuleResult rule_nilpotent(const GroupPtr& G, const json& in) {
  WeightedMultiset ms = ms_from(G, in);
  RuleResult out;
  if (!is_nilpotent(G)) {
    out.data = {{"applies", false}};
    out.conclusion = "group not nilpotent";
    return out;
  }
  std::vector<long> nontrivial;
  std::map<long, std::vector<Subgroup>> S;
  for (long l : prime_factors(G->order())) {
    Subgroup P = sylow(G, l);
    SubgroupAsGroup A = as_group(P);
    std::vector<Subgroup> red = local_reduced(ms, A, l);
    bool whole = red.size() == 1 && red[0].order() == P.order();
    S[l] = globalize_all(A, red);
    if (!whole) nontrivial.push_back(l);
  }
  if (nontrivial.size() != 1) {
    out.data = {{"applies", false}};
    out.conclusion = "restrictions nontrivial at " + std::to_string(nontrivial.size()) + " primes";
    return out;
  }
  const long q = nontrivial[0];
  Subgroup hall = trivial_subgroup(G);
  for (long l : prime_factors(G->order()))
    if (l != q) hall = join(hall, sylow(G, l));
  std::vector<Subgroup> Hp;
  for (auto& K : S[q]) Hp.push_back(join(K, hall));
  std::sort(Hp.begin(), Hp.end());
  SubgroupAsGroup A = as_group(sylow(G, q));
  std::vector<Subgroup> local;
  for (auto& K : S[q]) local.push_back(localize(A, K));
  PGroupCriterion c = p_group_criterion(local, q);
  out.data = {{"applies", true}, {"q", q}, {"qp", c.qi}};
  out.conclusion = "only q = " + std::to_string(q) + " restricts nontrivially; H' = " + set_text(Hp) +
                   ", G/core(H') of order " + std::to_string(G->order() / multiset_core(Hp).order()) + "; " + c.text +
                   ": " + (c.qi ? "quasi-permutation" : "not quasi-invertible");
  return out;
}

RuleResult rule_fallback(const GroupPtr& G, const json& in) {
  (void)ms_from(G, in);
  return RuleResult{"quasi-invertible; no rule settles quasi-permutation", json{{"level", "QuasiInvertibleQPUnknown"}}};
}

using RuleFn = RuleResult (*)(const GroupPtr&, const json&);

struct RuleEntry {
  RuleInfo info;
  RuleFn fn;
};

const std::vector<RuleEntry>& rules() {
  static const std::vector<RuleEntry> table = {
      {{"weights", "dominated weighted copies split off as permutation summands"}, rule_weights},
      {{"weighted-generic", "weighted input: only group-level facts apply"}, rule_weighted_generic},
      {{"gcd-one", "gcd of indices 1: the augmentation splits"}, rule_gcd_one},
      {{"sylow-criterion", "quasi-invertibility tested on one Sylow subgroup"}, rule_sylow},
      {{"qi-decision", "quasi-invertible iff every prime dividing d passes"}, rule_qi_decision},
      {{"special-d2", "d = 2: special pair with an index in 4Z, or special triple"}, rule_special_d2},
      {{"special-d3", "d >= 3: special pair"}, rule_special_d3},
      {{"sylow-cyclic", "Sylow-cyclic groups: quasi-permutation iff D and P* are disjoint"}, rule_sylow_cyclic},
      {{"dihedral", "dihedral groups: odd d, or normal form matching one of four cases"}, rule_dihedral},
      {{"p-group", "p-groups: quasi-permutation iff quasi-invertible"}, rule_p_group},
      {{"nilpotent-transfer", "nilpotent groups with one nontrivial Sylow restriction"}, rule_nilpotent},
      {{"fallback", "no rule settles quasi-permutation"}, rule_fallback},
  };
  return table;
}

const RuleEntry& entry(const std::string& id) {
  for (auto& e : rules())
    if (e.info.id == id) return e;
  throw std::invalid_argument("unknown rule: " + id);
}

struct Tracer {
  GroupPtr G;
  Verdict& v;
  RuleResult run(const std::string& id, json input) {
    const RuleEntry& e = entry(id);
    RuleResult r = e.fn(G, input);
    v.trace.push_back(TraceStep{id, e.info.anchor, std::move(input), r.conclusion});
    return r;
  }
};

// Removes weights when possible; returns false when the verdict is already final.
bool unweight(Tracer& tr, WeightedMultiset& cur) {
  if (cur.is_unweighted()) return true;
  RuleResult r = tr.run("weights", snapshot(cur));
  cur = WeightedMultiset::from_json(tr.G, r.data.at("multiset"));
  if (cur.is_unweighted()) return true;
  RuleResult g = tr.run("weighted-generic", snapshot(cur));
  tr.v.level = level_from_string(g.data.at("level"));
  return false;
}

bool gcd_one(Tracer& tr, const WeightedMultiset& cur) {
  RuleResult r = tr.run("gcd-one", snapshot(cur));
  if (!r.data.at("applies").get<bool>()) return false;
  GLatticeMap eps = weighted_augmentation(cur);
  IntMatrix s = matrix_from_json(r.data.at("section"));
  tr.v.section = GLatticeMap(eps.target(), eps.source(), s);
  tr.v.level = Level::StablyPermutation;
  return true;
}

}  // namespace

std::string to_string(Level l) {
  switch (l) {
    case Level::StablyPermutation: return "StablyPermutation";
    case Level::QuasiPermutation: return "QuasiPermutation";
    case Level::QuasiInvertibleOnly: return "QuasiInvertibleOnly";
    case Level::NotQuasiInvertible: return "NotQuasiInvertible";
    case Level::QuasiInvertibleQPUnknown: return "QuasiInvertibleQPUnknown";
    case Level::Unknown: return "Unknown";
  }
  return "Unknown";
}

Level level_from_string(const std::string& s) {
  for (Level l : {Level::StablyPermutation, Level::QuasiPermutation, Level::QuasiInvertibleOnly,
                  Level::NotQuasiInvertible, Level::QuasiInvertibleQPUnknown, Level::Unknown})
    if (to_string(l) == s) return l;
  throw std::invalid_argument("unknown level: " + s);
}

bool is_quasi_invertible(Level l) {
  return l == Level::StablyPermutation || l == Level::QuasiPermutation || l == Level::QuasiInvertibleOnly ||
         l == Level::QuasiInvertibleQPUnknown;
}

bool is_decided(Level l) { return l != Level::QuasiInvertibleQPUnknown && l != Level::Unknown; }

const std::vector<RuleInfo>& rule_table() {
  static const std::vector<RuleInfo> t = [] {
    std::vector<RuleInfo> v;
    for (auto& e : rules()) v.push_back(e.info);
    return v;
  }();
  return t;
}

nlohmann::json TraceStep::to_json() const {
  return json{{"rule", rule}, {"anchor", anchor}, {"input", input}, {"conclusion", conclusion}};
}

nlohmann::json Verdict::to_json() const {
  json j{{"level", to_string(level)}, {"trace", json::array()}};
  for (auto& s : trace) j["trace"].push_back(s.to_json());
  j["section"] = section ? matrix_to_json(section->matrix()) : json(nullptr);
  return j;
}

std::string Verdict::trace_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < trace.size(); ++i)
    os << i + 1 << ". [" << trace[i].rule << "] " << trace[i].anchor << "\n   " << trace[i].conclusion << "\n";
  os << "level: " << to_string(level) << "\n";
  return os.str();
}

RuleResult apply_rule(const std::string& rule, const GroupPtr& G, const nlohmann::json& input) {
  return entry(rule).fn(G, input);
}

bool replay(const Verdict& v, const GroupPtr& G, std::string* mismatch) {
  for (auto& s : v.trace) {
    const RuleEntry& e = entry(s.rule);
    std::string got = e.fn(G, s.input).conclusion;
    if (got != s.conclusion || e.info.anchor != s.anchor) {
      if (mismatch) *mismatch = s.rule + ": expected \"" + s.conclusion + "\", got \"" + got + "\"";
      return false;
    }
  }
  return true;
}

SylowTest sylow_test(const WeightedMultiset& ms, long p, int conjugator) {
  const GroupPtr& G = ms.group();
  SylowTest out;
  out.p = p;
  out.P = conjugate(sylow(G, p), conjugator);
  SubgroupAsGroup A = as_group(out.P);
  std::vector<Subgroup> red = local_reduced(ms, A, p);
  PGroupCriterion c = p_group_criterion(red, p);
  out.qi = c.qi;
  out.criterion = c.text;
  out.core = globalize(A, c.core);
  out.reduced = globalize_all(A, red);
  std::sort(out.reduced.begin(), out.reduced.end());
  return out;
}

std::vector<long> p_star_set(const GroupPtr& G) {
  std::vector<long> out;
  for (long p : prime_factors(G->order())) {
    Subgroup S = sylow(G, p);
    if (!is_normal(S)) continue;
    int central = 0;
    for (int g = 0; g < G->order(); ++g) {
      bool c = std::all_of(S.generators().begin(), S.generators().end(),
                           [&](int x) { return G->conj(g, x) == x; });
      central += c;
    }
    if (G->order() / central >= 3) out.push_back(p);
  }
  return out;
}

HallDecomposition hall_decomposition(const GroupPtr& G) {
  if (!all_sylow_cyclic(G)) throw NotSylowCyclic("hall_decomposition: some Sylow subgroup is not cyclic");
  Subgroup N = trivial_subgroup(G);
  for (long p : prime_factors(G->order())) {
    Subgroup S = sylow(G, p);
    if (is_normal(S)) N = join(N, S);
  }
  const int m = G->order() / N.order();
  for (int g = 0; g < G->order(); ++g)
    if (G->element_order(g) == m) {
      Subgroup C(G, {g});
      if (intersection(C, N).order() == 1 && is_cyclic(N)) return HallDecomposition{N, C};
    }
  throw std::logic_error("hall_decomposition: no cyclic complement found");
}

DihedralMatch dihedral_case_match(const WeightedMultiset& input) {
  const GroupPtr& G = input.group();
  auto dg = dihedral_generators(G);
  if (!dg) throw NotDihedral("dihedral_case_match: group is not dihedral");
  WeightedMultiset ms = input.is_unweighted() ? input : remove_dominated(input).after;
  if (!ms.is_unweighted()) throw std::invalid_argument("dihedral_case_match: weights remain after reduction");
  auto [s, t] = *dg;
  DihedralMatch out;
  out.d = d_of(ms);
  if (out.d % 2 == 1) {
    out.label = "odd";
    return out;
  }
  SubgroupAsGroup A = as_group(sylow(G, 2));
  std::vector<Subgroup> set = ms.underlying_set();
  out.picture = sylow2_picture(set, A);
  std::vector<int> f = dihedral_flip(G, s, t);
  std::vector<Subgroup> fset;
  for (auto& H : set) fset.push_back(apply_map(H, f));
  std::vector<Subgroup> fpic = sylow2_picture(fset, A);
  for (auto& c : dihedral_candidates(G, s, t, out.d)) {
    std::vector<Subgroup> cp = sylow2_picture(c.members, A);
    if (cp == out.picture || cp == fpic) {
      out.label = c.label;
      out.via_automorphism = cp != out.picture;
      return out;
    }
  }
  return out;
}

Verdict classify_dihedral(const WeightedMultiset& ms) {
  if (!dihedral_generators(ms.group())) throw NotDihedral("classify_dihedral: group is not dihedral");
  Verdict v;
  Tracer tr{ms.group(), v};
  WeightedMultiset cur = ms;
  if (!unweight(tr, cur)) return v;
  if (gcd_one(tr, cur)) return v;
  RuleResult r = tr.run("dihedral", snapshot(cur));
  v.level = r.data.at("label").is_null() ? Level::NotQuasiInvertible : Level::QuasiPermutation;
  return v;
}

Verdict classify(const WeightedMultiset& ms, const ClassifyOptions& opt) {
  const GroupPtr& G = ms.group();
  Verdict v;
  Tracer tr{G, v};
  WeightedMultiset cur = ms;
  if (!unweight(tr, cur)) return v;
  if (gcd_one(tr, cur)) return v;

  json snap = snapshot(cur);
  json csnap = snap;
  if (opt.sylow_conjugator) csnap["conjugator"] = opt.sylow_conjugator;
  for (long p : prime_set(cur)) {
    json in = csnap;
    in["p"] = p;
    tr.run("sylow-criterion", in);
  }
  const bool qi = tr.run("qi-decision", csnap).data.at("qi").get<bool>();

  const long d = d_of(cur);
  const char* prover = d == 2 ? "special-d2" : "special-d3";
  RuleResult pr = tr.run(prover, snap);
  if (pr.data.at("not_qi").get<bool>() && qi)
    throw InternalContradiction(std::string(prover) + " obstructs but the Sylow criterion passes for " +
                                cur.describe());

  const bool dihedral = dihedral_generators(G).has_value();
  auto dihedral_check = [&](bool expect_qp) {
    RuleResult r = tr.run("dihedral", snap);
    if (r.data.at("label").is_null() == expect_qp)
      throw InternalContradiction("dihedral case match disagrees with the Sylow criterion for " + cur.describe());
  };

  if (!qi) {
    if (dihedral) dihedral_check(false);
    v.level = Level::NotQuasiInvertible;
    return v;
  }
  if (all_sylow_cyclic(G)) {
    bool qp = tr.run("sylow-cyclic", snap).data.at("qp").get<bool>();
    if (dihedral) dihedral_check(qp);
    v.level = qp ? Level::QuasiPermutation : Level::QuasiInvertibleOnly;
    return v;
  }
  if (dihedral) {
    dihedral_check(true);
    v.level = Level::QuasiPermutation;
    return v;
  }
  if (is_p_group(whole_group(G))) {
    tr.run("p-group", snap);
    v.level = Level::QuasiPermutation;
    return v;
  }
  if (is_nilpotent(G)) {
    RuleResult r = tr.run("nilpotent-transfer", snap);
    if (r.data.at("applies").get<bool>()) {
      if (!r.data.at("qp").get<bool>())
        throw InternalContradiction("nilpotent transfer disagrees with the Sylow criterion for " + cur.describe());
      v.level = Level::QuasiPermutation;
      return v;
    }
  }
  tr.run("fallback", snap);
  v.level = Level::QuasiInvertibleQPUnknown;
  return v;
}

}  // namespace torus
