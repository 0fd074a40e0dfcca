#include "torus/cohomology.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <exception>
#include <sstream>

namespace torus {

std::string to_string(H1Method m) {
  return m == H1Method::CyclicFormula ? "cyclic-formula" : "presentation-cocycle";
}

std::string to_string(TriState t) {
  switch (t) {
    case TriState::Yes: return "yes";
    case TriState::No: return "no";
    case TriState::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<Int> CohomologyReport::elementary_divisors() const {
  std::vector<Int> out;
  for (Int d : invariant_factors) {
    for (Int p = 2; p * p <= d; ++p) {
      if (d % p != 0) continue;
      Int q = 1;
      while (d % p == 0) d /= p, q *= p;
      out.push_back(q);
    }
    if (d > 1) out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json CohomologyReport::to_json() const {
  nlohmann::json inv = nlohmann::json::array(), ele = nlohmann::json::array();
  for (auto& d : invariant_factors) inv.push_back(d.get_str());
  for (auto& d : elementary_divisors()) ele.push_back(d.get_str());
  nlohmann::json j = {{"subgroup", H.describe()},
                      {"order", H.order()},
                      {"degree", degree},
                      {"invariant_factors", inv},
                      {"elementary_divisors", ele},
                      {"method", to_string(method)}};
  if (degree == 0) j["free_rank"] = free_rank;
  return j;
}

namespace {

// Z^z / (column span of Y), which must be finite.
void finite_quotient(const IntMatrix& Y, std::size_t z, CohomologyReport& rep) {
  if (z == 0) return;
  if (Y.cols() == 0) throw std::logic_error("H^1 computation: infinite quotient");
  SnfResult s = snf(Y);
  if (s.rank != z) throw std::logic_error("H^1 computation: infinite quotient");
  for (auto& d : s.divisors)
    if (d != 1) rep.invariant_factors.push_back(d);
}

}  // namespace

CohomologyReport h1_cyclic(const GLattice& M, const Subgroup& H) {
  CohomologyReport rep;
  rep.H = H;
  rep.method = H1Method::CyclicFormula;
  auto gen = cyclic_generator(H);
  if (!gen) throw std::invalid_argument("h1_cyclic: subgroup is not cyclic");
  const std::size_t r = M.rank();
  if (r == 0 || H.order() == 1) return rep;
  IntMatrix A = M.action(*gen);
  IntMatrix N(r, r), P = IntMatrix::identity(r);
  for (int i = 0; i < H.order(); ++i) {
    N = N + P;
    P = P * A;
  }
  IntMatrix K = N.is_zero() ? IntMatrix::identity(r) : kernel_basis(N);
  if (K.cols() == 0) return rep;
  IntMatrix B = A - IntMatrix::identity(r);
  IntMatrix Y = left_inverse(K) * B;
  if (K * Y != B) throw std::logic_error("h1_cyclic: image of h-1 escapes the kernel of the norm");
  finite_quotient(Y, K.cols(), rep);
  return rep;
}

CohomologyReport h1_presentation(const GLattice& M, const Subgroup& H) {
  CohomologyReport rep;
  rep.H = H;
  rep.method = H1Method::PresentationCocycle;
  const std::size_t r = M.rank();
  if (r == 0 || H.order() == 1) return rep;
  SubgroupAsGroup sub = as_group(H);
  const auto& K = sub.group;
  const std::size_t k = K->generators().size();
  const std::size_t w = r * k;
  std::vector<IntMatrix> gm;
  for (int g : K->generators()) gm.push_back(M.action(sub.to_parent[g]));
  // Relators come from the Cayley graph: each edge x -> x s off the spanning tree closes a loop.
  // phi[x] evaluates a cocycle on the tree word of x, linearly in the generator values.
  std::vector<IntMatrix> act(K->order()), phi(K->order());
  act[0] = IntMatrix::identity(r);
  phi[0] = IntMatrix(r, w);
  for (int y = 1; y < K->order(); ++y) {
    int p = K->parent(y), s = K->parent_gen(y);
    act[y] = act[p] * gm[s];
    phi[y] = phi[p];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) phi[y](i, s * r + j) += act[p](i, j);
  }
  std::vector<IntMatrix> rows;
  for (int x = 0; x < K->order(); ++x)
    for (std::size_t s = 0; s < k; ++s) {
      int y = K->mul(x, K->generators()[s]);
      if (K->parent(y) == x && K->parent_gen(y) == static_cast<int>(s)) continue;
      IntMatrix R = phi[x] - phi[y];
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) R(i, s * r + j) += act[x](i, j);
      rows.push_back(std::move(R));
    }
  IntMatrix C(0, w);
  for (auto& R : rows) C = IntMatrix::vstack(C, R);
  IntMatrix Z = C.rows() == 0 ? IntMatrix::identity(w) : kernel_basis(C);
  if (Z.cols() == 0) return rep;
  IntMatrix B(w, r);
  for (std::size_t s = 0; s < k; ++s) B.set_block(s * r, 0, gm[s] - IntMatrix::identity(r));
  IntMatrix Y = left_inverse(Z) * B;
  if (Z * Y != B) throw std::logic_error("h1_presentation: coboundary is not a cocycle");
  finite_quotient(Y, Z.cols(), rep);
  return rep;
}

CohomologyReport h1(const GLattice& M, const Subgroup& H) {
  return is_cyclic(H) ? h1_cyclic(M, H) : h1_presentation(M, H);
}

CohomologyReport h0(const GLattice& M, const Subgroup& H) {
  CohomologyReport rep;
  rep.H = H;
  rep.degree = 0;
  rep.method = H1Method::PresentationCocycle;
  rep.free_rank = fixed_basis(M, H).cols();
  return rep;
}

namespace {

CoflabbyReport assemble(std::vector<CohomologyReport> table) {
  CoflabbyReport out;
  out.table = std::move(table);
  for (auto& rep : out.table)
    if (!rep.vanishes()) {
      out.coflabby = false;
      out.first_failure = rep.H;
      break;
    }
  return out;
}

}  // namespace

CoflabbyReport coflabby_report(const GLattice& M, SubgroupFilter filter, int jobs) {
  auto classes = subgroups_up_to_conjugacy(M.group(), filter);
  std::vector<CohomologyReport> table(classes.size());
  std::exception_ptr err;
  const int n = static_cast<int>(classes.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      table[i] = h1(M, classes[i]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return assemble(std::move(table));
}

CoflabbyReport coflabby_report_serial(const GLattice& M, SubgroupFilter filter) {
  std::vector<CohomologyReport> table;
  for (auto& H : subgroups_up_to_conjugacy(M.group(), filter)) table.push_back(h1(M, H));
  return assemble(std::move(table));
}

bool is_coflabby(const GLattice& M, SubgroupFilter filter, int jobs) {
  return coflabby_report(M, filter, jobs).coflabby;
}

bool is_flabby(const GLattice& M, SubgroupFilter filter, int jobs) {
  return coflabby_report(dual(M), filter, jobs).coflabby;
}

CoflabbyResolution coflabby_resolution(const GLattice& M, int jobs) {
  const auto& G = M.group();
  const std::size_t r = M.rank();
  auto classes = subgroups_up_to_conjugacy(G, SubgroupFilter::All);
  auto acts = M.all_actions();
  std::vector<std::pair<Subgroup, IntMatrix>> summands;
  std::vector<GLattice> parts;
  IntMatrix f(r, 0);
  auto image_of_fixed = [&](const Subgroup& H) {
    if (parts.empty()) return IntMatrix(r, 0);
    GLattice R = direct_sum(parts);
    IntMatrix F = fixed_basis(R, H);
    return F.cols() == 0 ? IntMatrix(r, 0) : IntMatrix(f * F);
  };
  for (auto it = classes.rbegin(); it != classes.rend(); ++it) {
    const Subgroup& H = *it;
    IntMatrix MH = fixed_basis(M, H);
    IntMatrix img = image_of_fixed(H);
    for (std::size_t j = 0; j < MH.cols(); ++j) {
      IntMatrix v = MH.col_range(j, j + 1);
      if (img.cols() > 0 && span_contains(img, v)) continue;
      CosetSpace cs = coset_space(H);
      IntMatrix block(r, cs.size());
      for (std::size_t c = 0; c < cs.size(); ++c) block.set_block(0, c, acts[cs.reps[c]] * v);
      f = IntMatrix::hstack(f, block);
      parts.push_back(permutation_lattice(H));
      summands.emplace_back(H, v);
      img = image_of_fixed(H);
    }
  }
  CoflabbyResolution res;
  GLattice R = parts.empty() ? trivial_lattice(G, 0) : direct_sum(parts);
  res.projection = GLatticeMap(R, M, f);
  IntMatrix K = kernel_of(res.projection);
  GLattice F = sublattice(R, K);
  res.inclusion = GLatticeMap(F, R, K);
  res.summands = std::move(summands);
  ExactnessReport ex = check_exact({res.inclusion, res.projection});
  if (!ex.exact) throw std::logic_error("coflabby_resolution: sequence not exact: " + ex.failure);
  CoflabbyReport cf = coflabby_report(F, SubgroupFilter::PrimePower, jobs);
  if (!cf.coflabby) throw ResolutionNotCoflabby("coflabby_resolution: kernel has H^1 at " + cf.first_failure->describe());
  return res;
}

InvertibilityCertificate is_invertible_certified(const GLattice& M, int jobs) {
  InvertibilityCertificate cert;
  try {
    CoflabbyReport cf = coflabby_report(M, SubgroupFilter::PrimePower, jobs);
    if (!cf.coflabby) {
      cert.verdict = TriState::No;
      cert.reason = "H^1 of the lattice is nonzero";
      cert.witness = cf.first_failure;
      return cert;
    }
    CoflabbyReport fl = coflabby_report(dual(M), SubgroupFilter::PrimePower, jobs);
    if (!fl.coflabby) {
      cert.verdict = TriState::No;
      cert.reason = "H^1 of the dual lattice is nonzero";
      cert.witness = fl.first_failure;
      return cert;
    }
    cert.resolution = coflabby_resolution(M, jobs);
    SplitResult s = find_section(cert.resolution->projection);
    if (s) {
      cert.verdict = TriState::Yes;
      cert.reason = "direct summand of a permutation lattice via a split coflabby resolution";
      cert.section = s.section;
    } else {
      // Ext^1 of an invertible lattice into a coflabby one vanishes, so the resolution would split.
      cert.verdict = TriState::No;
      cert.reason = "coflabby resolution does not split";
    }
  } catch (const ResolutionNotCoflabby& e) {
    cert.verdict = TriState::Inconclusive;
    cert.reason = e.what();
  } catch (const OrderOverflow& e) {
    cert.verdict = TriState::Inconclusive;
    cert.reason = e.what();
  }
  return cert;
}

std::string cohomology_table_text(const std::vector<CohomologyReport>& table) {
  std::vector<std::array<std::string, 4>> rows{{"subgroup", "order", "H^1", "method"}};
  for (auto& rep : table) {
    std::string h = "0";
    if (!rep.vanishes()) {
      h.clear();
      for (auto& d : rep.invariant_factors) h += (h.empty() ? "Z/" : " + Z/") + d.get_str();
    }
    rows.push_back({rep.H.describe(), std::to_string(rep.H.order()), h, to_string(rep.method)});
  }
  std::array<std::size_t, 4> width{};
  for (auto& row : rows)
    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (auto& row : rows) {
    for (std::size_t c = 0; c < 4; ++c) {
      os << row[c];
      if (c + 1 < 4) os << std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json cohomology_table_json(const std::vector<CohomologyReport>& table) {
  nlohmann::json j = nlohmann::json::array();
  for (auto& rep : table) j.push_back(rep.to_json());
  return j;
}

}  // namespace torus
