#include <doctest.h>

#include "torus/survey.hpp"

using namespace torus;

namespace {

bool has_row(const Survey& s, const std::vector<std::string>& members, Level l) {
  for (auto& r : s.rows) {
    std::vector<std::string> m;
    for (auto& H : r.members) m.push_back(H.describe());
    if (m == members) return r.level == l;
  }
  return false;
}

}  // namespace

TEST_CASE("survey rows are strongly reduced and unique up to conjugacy") {
  auto G = make_dihedral(6);
  SurveyOptions opt;
  opt.max_members = 3;
  auto sets = survey_multisets(G, opt);
  CHECK_FALSE(sets.empty());
  for (auto& m : sets) CHECK(is_strongly_reduced(m));
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      if (sets[i].size() != sets[j].size()) continue;
      for (int g = 0; g < G->order(); ++g) {
        std::vector<Subgroup> c;
        for (auto& H : sets[i]) c.push_back(conjugate(H, g));
        std::sort(c.begin(), c.end());
        auto other = sets[j];
        std::sort(other.begin(), other.end());
        CHECK(c != other);
      }
    }
}

TEST_CASE("survey on D4 contains the reflection pair positive") {
  auto G = make_dihedral(4);
  SurveyOptions opt;
  opt.max_members = 2;
  Survey s = run_survey(G, opt, 2);
  CHECK_FALSE(s.contradiction);
  CHECK(has_row(s, {"<t>", "<s t>"}, Level::QuasiPermutation));
  CHECK(has_row(s, {"<t>", "<s>"}, Level::NotQuasiInvertible));
  CHECK(has_row(s, {"<s^2>"}, Level::NotQuasiInvertible));
}

TEST_CASE("survey filters") {
  auto G = make_dihedral(6);
  SurveyOptions opt;
  opt.max_members = 2;
  opt.d_filter = 2;
  for (auto& m : survey_multisets(G, opt)) CHECK(d_of(WeightedMultiset::of(m)) == 2);
  SurveyOptions small;
  small.max_order = 2;
  for (auto& m : survey_multisets(G, small))
    for (auto& H : m) CHECK(H.order() <= 2);
}

TEST_CASE("parallel survey matches the serial reference") {
  for (auto& G : {make_dihedral(8), make_product({make_cyclic(2), make_cyclic(6)})}) {
    SurveyOptions opt;
    opt.max_members = 2;
    auto a = run_survey(G, opt, 4).to_json().dump();
    auto b = run_survey_serial(G, opt).to_json().dump();
    CHECK(a == b);
    CHECK(run_survey(G, opt, 1).to_json().dump() == b);
  }
}
