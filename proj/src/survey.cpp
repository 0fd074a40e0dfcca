#include "torus/survey.hpp"

#include <omp.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace torus {

namespace {

SurveyRow survey_row(const std::vector<Subgroup>& members) {
  SurveyRow row;
  row.members = members;
  WeightedMultiset ms = WeightedMultiset::of(members);
  row.d = d_of(ms);
  try {
    Verdict v = classify(ms);
    row.level = v.level;
    row.rule = v.trace.empty() ? "" : v.trace.back().rule;
  } catch (const InternalContradiction& e) {
    row.level = Level::Unknown;
    row.error = e.what();
  }
  return row;
}

Survey finish(std::vector<SurveyRow> rows) {
  Survey s;
  s.rows = std::move(rows);
  for (auto& r : s.rows) s.contradiction = s.contradiction || !r.error.empty();
  return s;
}

}  // namespace

nlohmann::json SurveyRow::to_json() const {
  nlohmann::json mem = nlohmann::json::array();
  for (auto& H : members) mem.push_back(H.describe());
  nlohmann::json j{{"members", mem}, {"d", d}, {"level", to_string(level)}, {"rule", rule}};
  if (!error.empty()) j["error"] = error;
  return j;
}

nlohmann::json Survey::to_json() const {
  nlohmann::json r = nlohmann::json::array();
  for (auto& row : rows) r.push_back(row.to_json());
  return {{"rows", r}, {"count", rows.size()}, {"contradiction", contradiction}};
}

std::string Survey::text() const {
  std::ostringstream os;
  for (auto& row : rows) {
    std::string mem;
    for (auto& H : row.members) mem += (mem.empty() ? "" : ", ") + H.describe();
    os << "{" << mem << "}  d=" << row.d << "  " << to_string(row.level);
    if (!row.rule.empty()) os << "  [" << row.rule << "]";
    if (!row.error.empty()) os << "  ERROR: " << row.error;
    os << "\n";
  }
  return os.str();
}

std::vector<std::vector<Subgroup>> survey_multisets(const GroupPtr& G, const SurveyOptions& opt) {
  std::vector<Subgroup> subs;
  const int hi = opt.max_order > 0 ? opt.max_order : G->order() - 1;
  for (auto& H : all_subgroups(G))
    if (H.order() >= opt.min_order && H.order() <= hi && H.order() < G->order()) subs.push_back(H);
  const std::size_t n = subs.size();

  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[subs[i].elements()] = i;
  std::vector<std::vector<std::size_t>> conj(G->order(), std::vector<std::size_t>(n));
  for (int g = 0; g < G->order(); ++g)
    for (std::size_t i = 0; i < n; ++i) conj[g][i] = index.at(conjugate(subs[i], g).elements());

  // related[i][j]: a conjugate of one lies in the other.
  std::vector<std::vector<char>> related(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (int g = 0; g < G->order() && !related[i][j]; ++g)
        if (subs[j].contains(subs[conj[g][i]]) || subs[i].contains(subs[conj[g][j]])) related[i][j] = 1;

  std::map<std::vector<std::size_t>, int> keys;
  std::vector<std::size_t> pick;
  auto canonical = [&](const std::vector<std::size_t>& p) {
    std::vector<std::size_t> best;
    for (int g = 0; g < G->order(); ++g) {
      std::vector<std::size_t> k;
      for (auto i : p) k.push_back(conj[g][i]);
      std::sort(k.begin(), k.end());
      if (best.empty() || k < best) best = k;
    }
    return best;
  };
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (!pick.empty()) {
      bool keep = true;
      if (opt.d_filter) {
        long d = 0;
        for (auto i : pick) d = std::gcd(d, static_cast<long>(G->order() / subs[i].order()));
        keep = d == *opt.d_filter;
      }
      if (keep) keys.emplace(canonical(pick), 0);
    }
    if (pick.size() == opt.max_members) return;
    for (std::size_t i = start; i < n; ++i) {
      bool ok = true;
      for (auto j : pick) ok = ok && !related[i][j];
      if (!ok) continue;
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);

  std::vector<std::vector<Subgroup>> out;
  for (auto& [k, unused] : keys) {
    std::vector<Subgroup> m;
    for (auto i : k) m.push_back(subs[i]);
    out.push_back(std::move(m));
  }
  return out;
}

Survey run_survey(const GroupPtr& G, const SurveyOptions& opt, int jobs) {
  auto sets = survey_multisets(G, opt);
  std::vector<SurveyRow> rows(sets.size());
  const int n = static_cast<int>(sets.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) rows[i] = survey_row(sets[i]);
  return finish(std::move(rows));
}

Survey run_survey_serial(const GroupPtr& G, const SurveyOptions& opt) {
  std::vector<SurveyRow> rows;
  for (auto& m : survey_multisets(G, opt)) rows.push_back(survey_row(m));
  return finish(std::move(rows));
}

}  // namespace torus
