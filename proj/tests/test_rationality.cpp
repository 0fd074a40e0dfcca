#include <doctest.h>

#include <random>

#include "torus/rationality.hpp"

using namespace torus;

namespace {

Subgroup sub(const GroupPtr& G, std::vector<std::string> gens) {
  std::vector<int> ids;
  for (auto& g : gens) ids.push_back(G->parse_element(g));
  return Subgroup(G, ids);
}

GroupPtr order60() {
  return make_group(nlohmann::json::parse(
      R"({"kind":"semidirect","normal":{"kind":"cyclic","n":15},"quotient":{"kind":"cyclic","n":4},
          "action":[[0,"s^2"]],"names":["s","t"]})"));
}

// (C35 x| C3) x C3; the first C3 acts on the order-7 part by squaring.
GroupPtr order315() {
  return make_group(nlohmann::json::parse(
      R"({"kind":"product","factors":[
            {"kind":"semidirect","normal":{"kind":"cyclic","n":35},"quotient":{"kind":"cyclic","n":3},
             "action":[[0,"s^16"]],"names":["s","t"]},
            {"kind":"cyclic","n":3}]})"));
}

Level level_of(const std::vector<Subgroup>& set) { return classify(WeightedMultiset::of(set)).level; }

std::vector<WeightedMultiset> all_small_sets(const GroupPtr& G, std::size_t max_size) {
  auto subs = subgroups_up_to_conjugacy(G, SubgroupFilter::All);
  std::vector<Subgroup> proper;
  for (auto& H : subs)
    if (H.order() < G->order()) proper.push_back(H);
  std::vector<WeightedMultiset> out;
  for (std::size_t i = 0; i < proper.size(); ++i) {
    out.push_back(WeightedMultiset::of({proper[i]}));
    if (max_size >= 2)
      for (std::size_t j = i + 1; j < proper.size(); ++j) out.push_back(WeightedMultiset::of({proper[i], proper[j]}));
  }
  return out;
}

}  // namespace

TEST_CASE("levels round-trip through strings") {
  for (Level l : {Level::StablyPermutation, Level::QuasiPermutation, Level::QuasiInvertibleOnly,
                  Level::NotQuasiInvertible, Level::QuasiInvertibleQPUnknown, Level::Unknown})
    CHECK(level_from_string(to_string(l)) == l);
  CHECK_THROWS(level_from_string("Flabby"));
  CHECK(is_quasi_invertible(Level::QuasiInvertibleOnly));
  CHECK_FALSE(is_quasi_invertible(Level::NotQuasiInvertible));
  CHECK_FALSE(is_decided(Level::QuasiInvertibleQPUnknown));
}

TEST_CASE("p-star set and Hall decomposition") {
  auto G = order60();
  CHECK(p_star_set(G) == std::vector<long>{5});
  auto hd = hall_decomposition(G);
  CHECK(hd.N == sub(G, {"s"}));
  CHECK(hd.complement.order() == 4);
  CHECK(is_cyclic(hd.complement));
  CHECK(intersection(hd.N, hd.complement).order() == 1);

  CHECK(p_star_set(make_dihedral(15)).empty());
  CHECK(p_star_set(make_cyclic(12)).empty());
  auto hd15 = hall_decomposition(make_dihedral(15));
  CHECK(hd15.N.order() == 15);
  CHECK(hd15.complement.order() == 2);

  CHECK_THROWS_AS(hall_decomposition(make_dihedral(4)), NotSylowCyclic);

  // Every Sylow-cyclic group in the list: N is normal, both parts cyclic, coprime orders.
  for (auto& H : {make_cyclic(30), make_dihedral(5), make_dihedral(9), order60()}) {
    auto h = hall_decomposition(H);
    CHECK(is_normal(h.N));
    CHECK(is_cyclic(h.N));
    CHECK(is_cyclic(h.complement));
    CHECK(h.N.order() * h.complement.order() == H->order());
    CHECK(std::gcd(h.N.order(), h.complement.order()) == 1);
  }
}

TEST_CASE("gcd one gives a section of the augmentation") {
  auto D6 = make_dihedral(6);
  auto ms = WeightedMultiset::of({sub(D6, {"s^2"}), sub(D6, {"s^3", "t"})});
  Verdict v = classify(ms);
  CHECK(v.level == Level::StablyPermutation);
  REQUIRE(v.section.has_value());
  IntMatrix comp = weighted_augmentation(ms).matrix() * v.section->matrix();
  CHECK(comp == IntMatrix::identity(1));
  CHECK(replay(v, D6));
}

TEST_CASE("order 60 example: quasi-permutation with P* = {5}, D = {3}") {
  auto G = order60();
  auto ms = WeightedMultiset::of({sub(G, {"s^3", "t^2"}), sub(G, {"t"})});
  CHECK(d_of(ms) == 3);
  Verdict v = classify(ms);
  CHECK(v.level == Level::QuasiPermutation);
  bool saw = false;
  for (auto& s : v.trace)
    if (s.rule == "sylow-cyclic") {
      saw = true;
      CHECK(s.conclusion.find("D = {3}, P* = {5}") != std::string::npos);
    }
  CHECK(saw);
  std::string why;
  CHECK_MESSAGE(replay(v, G, &why), why);
}

TEST_CASE("order 60: D meeting P* gives quasi-invertible only") {
  auto G = order60();
  // <s^5, t> has index 5.
  auto ms = WeightedMultiset::of({sub(G, {"s^5", "t"})});
  Verdict v = classify(ms);
  CHECK(v.level == Level::QuasiInvertibleOnly);
}

TEST_CASE("C30 x C2 three-member example: quasi-permutation") {
  auto G = make_product({make_cyclic(30), make_cyclic(2)});
  int s = G->generators()[0], t = G->generators()[1];
  Subgroup H1(G, {G->power(s, 3)}), H2(G, {G->power(s, 5)}), H3(G, {G->power(s, 2), t});
  Verdict v = classify(WeightedMultiset::of({H1, H2, H3}));
  CHECK(v.level == Level::QuasiPermutation);
  bool saw = false;
  for (auto& st : v.trace)
    if (st.rule == "nilpotent-transfer") {
      saw = true;
      CHECK(st.conclusion.find("q = 2") != std::string::npos);
      CHECK(st.conclusion.find("of order 4") != std::string::npos);
      CHECK(st.conclusion.find("involutions generating") != std::string::npos);
    }
  CHECK(saw);
  CHECK(replay(v, G));
}

TEST_CASE("order 315 example: quasi-invertible") {
  auto G = order315();
  REQUIRE(G->order() == 315);
  int s = G->generators()[0], t = G->generators()[1];
  Subgroup H1(G, {G->power(s, 5), t}), H2(G, {G->power(s, 7), t});
  CHECK(H1.order() == 21);
  CHECK(H2.order() == 15);
  auto ms = WeightedMultiset::of({H1, H2});
  CHECK(d_of(ms) == 3);
  CHECK(is_normal(H1));
  CHECK(is_normal(join(H1, H2)));
  CHECK_FALSE(find_special_subset({H1, H2}, 2).has_value());
  SylowTest st = sylow_test(ms, 3);
  CHECK(st.qi);
  REQUIRE(st.reduced.size() == 1);
  CHECK(st.reduced[0] == Subgroup(G, {t}));
  Verdict v = classify(ms);
  CHECK(v.level != Level::NotQuasiInvertible);
  CHECK(is_quasi_invertible(v.level));
  CHECK(replay(v, G));
}

TEST_CASE("dihedral examples") {
  auto D4 = make_dihedral(4);
  CHECK(level_of({sub(D4, {"s"}), sub(D4, {"t"})}) == Level::NotQuasiInvertible);
  CHECK(level_of({sub(D4, {"t"}), sub(D4, {"s*t"})}) == Level::QuasiPermutation);

  auto sq = WeightedMultiset::of({sub(D4, {"s^2"})});
  CHECK(classify(sq).level == Level::NotQuasiInvertible);
  CHECK_FALSE(sylow_test(sq, 2).qi);
  DihedralMatch m = dihedral_case_match(sq);
  CHECK(m.d == 4);
  CHECK_FALSE(m.label.has_value());
  CHECK(classify_dihedral(sq).level == Level::NotQuasiInvertible);

  auto D8 = make_dihedral(8);
  CHECK(level_of({sub(D8, {"t"}), sub(D8, {"s*t"})}) == Level::QuasiPermutation);
  auto md = dihedral_case_match(WeightedMultiset::of({sub(D8, {"t"}), sub(D8, {"s*t"})}));
  CHECK(md.label == std::optional<std::string>("d"));

  auto D6 = make_dihedral(6);
  auto ms6 = WeightedMultiset::of({sub(D6, {"s^3"}), sub(D6, {"t"})});
  CHECK(classify(ms6).level == Level::QuasiPermutation);
  CHECK(dihedral_case_match(ms6).label == std::optional<std::string>("c"));

  // Case (b) with j = 1 folds into j = 0.
  auto mb = dihedral_case_match(WeightedMultiset::of({sub(D6, {"s^2", "s*t"})}));
  CHECK(mb.label == std::optional<std::string>("b"));

  auto D5 = make_dihedral(5);
  auto odd = dihedral_case_match(WeightedMultiset::of({sub(D5, {"t"})}));
  CHECK(odd.label == std::optional<std::string>("odd"));
  CHECK(classify_dihedral(WeightedMultiset::of({sub(D5, {"t"})})).level == Level::QuasiPermutation);

  CHECK_THROWS_AS(dihedral_case_match(WeightedMultiset::of({sub(order60(), {"t"})})), NotDihedral);
}

TEST_CASE("special-set provers agree with the Sylow criterion") {
  auto D4 = make_dihedral(4);
  Verdict v = classify(WeightedMultiset::of({sub(D4, {"s"}), sub(D4, {"t"})}));
  bool saw = false;
  for (auto& s : v.trace)
    if (s.rule == "special-d2") {
      saw = true;
      CHECK(s.conclusion.find("not quasi-invertible") != std::string::npos);
    }
  CHECK(saw);
}

TEST_CASE("weighted input") {
  auto D4 = make_dihedral(4);
  // <t> weight 2 is dominated by <s^2, t> weight 1.
  auto ms = WeightedMultiset(D4, {Member{sub(D4, {"t"}), {2}}, Member{sub(D4, {"s^2", "t"}), {1}}});
  Verdict v = classify(ms);
  REQUIRE_FALSE(v.trace.empty());
  CHECK(v.trace[0].rule == "weights");
  CHECK(replay(v, D4));

  auto C6 = make_cyclic(6);
  auto stuck = WeightedMultiset(C6, {Member{sub(C6, {"s^2"}), {2}}, Member{sub(C6, {"s^3"}), {3}}});
  Verdict w = classify(stuck);
  if (!remove_dominated(stuck).after.is_unweighted()) CHECK(w.level == Level::QuasiInvertibleQPUnknown);
}

TEST_CASE("exhaustive small groups: no contradictions, replayable traces") {
  std::vector<GroupPtr> groups = {make_dihedral(2), make_dihedral(3), make_dihedral(4), make_dihedral(6),
                                  make_dihedral(8), make_dihedral(12), make_cyclic(12),
                                  make_product({make_cyclic(2), make_cyclic(4)}),
                                  make_permutation_group(4, {{1, 2, 0, 3}, {1, 0, 3, 2}})};
  for (auto& G : groups)
    for (auto& ms : all_small_sets(G, 2)) {
      Verdict v;
      CHECK_NOTHROW(v = classify(ms));
      CHECK(replay(v, G));
      if (dihedral_generators(G)) {
        Level l = classify_dihedral(ms).level;
        if (v.level == Level::StablyPermutation)
          CHECK(l == Level::StablyPermutation);
        else
          CHECK(l == v.level);
      }
    }
}

TEST_CASE("property: Sylow choice does not change the verdict") {
  std::mt19937 rng(11);
  for (auto& G : {make_dihedral(6), make_dihedral(12), order60()}) {
    auto sets = all_small_sets(G, 2);
    for (int k = 0; k < 25; ++k) {
      auto& ms = sets[rng() % sets.size()];
      int g = static_cast<int>(rng() % G->order());
      CHECK(classify(ms).level == classify(ms, ClassifyOptions{g}).level);
    }
  }
}

TEST_CASE("property: restriction of a quasi-invertible verdict stays quasi-invertible") {
  // J restricted to K is a multinorm lattice of the restricted multiset up to permutation summands.
  std::mt19937 rng(5);
  for (auto& G : {make_dihedral(4), make_dihedral(6), make_dihedral(12)}) {
    auto sets = all_small_sets(G, 2);
    auto subs = all_subgroups(G);
    for (int k = 0; k < 30; ++k) {
      auto& ms = sets[rng() % sets.size()];
      Level l = classify(ms).level;
      if (!is_quasi_invertible(l)) continue;
      const Subgroup& K = subs[rng() % subs.size()];
      if (K.order() == 1) continue;
      SubgroupAsGroup A = as_group(K);
      Level lk = classify(restricted_members(ms, A)).level;
      CHECK(lk != Level::NotQuasiInvertible);
    }
  }
}

TEST_CASE("property: adding a member containing an existing one changes nothing") {
  // {H, K} with K inside H has the same reduced set as {H}.
  auto D12 = make_dihedral(12);
  auto subs = subgroups_up_to_conjugacy(D12, SubgroupFilter::All);
  for (auto& H : subs) {
    if (H.order() == D12->order()) continue;
    for (auto& K : subgroups_of(H)) {
      if (K == H) continue;
      CHECK(level_of({H}) == level_of({H, K}));
    }
  }
}

TEST_CASE("rule table and trace JSON") {
  CHECK(rule_table().size() >= 10);
  for (auto& r : rule_table()) {
    CHECK_FALSE(r.id.empty());
    CHECK_FALSE(r.anchor.empty());
  }
  auto D4 = make_dihedral(4);
  Verdict v = classify(WeightedMultiset::of({sub(D4, {"t"}), sub(D4, {"s*t"})}));
  auto j = v.to_json();
  CHECK(j["level"] == "QuasiPermutation");
  CHECK(j["trace"].size() == v.trace.size());
  CHECK(j.dump() == classify(WeightedMultiset::of({sub(D4, {"t"}), sub(D4, {"s*t"})})).to_json().dump());
  CHECK_FALSE(v.trace_text().empty());
  CHECK_THROWS(apply_rule("no-such-rule", D4, nlohmann::json::object()));

  Verdict tampered = v;
  tampered.trace.back().conclusion = "edited";
  std::string why;
  CHECK_FALSE(replay(tampered, D4, &why));
  CHECK(why.find("edited") != std::string::npos);
}
