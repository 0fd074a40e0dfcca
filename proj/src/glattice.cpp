#include "torus/glattice.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>

namespace torus {

namespace {

void require_same_group(const GroupPtr& a, const GroupPtr& b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": lattices over different groups");
}

IntMatrix vectorize(const IntMatrix& X) { return IntMatrix(X.rows() * X.cols(), 1, X.data()); }

IntMatrix columns_to_matrix(const std::vector<IntMatrix>& cols, std::size_t height) {
  IntMatrix K(height, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < height; ++i) K(i, j) = cols[j].data()[i];
  return K;
}

std::vector<IntMatrix> unvectorize(const IntMatrix& K, std::size_t rows, std::size_t cols) {
  std::vector<IntMatrix> out;
  for (std::size_t j = 0; j < K.cols(); ++j) out.emplace_back(rows, cols, K.col(j));
  return out;
}

// Canonical Z-basis of a hom space: column HNF of the vectorized generators.
std::vector<IntMatrix> canonical_homs(const std::vector<IntMatrix>& homs, std::size_t rows, std::size_t cols) {
  if (homs.empty()) return {};
  std::vector<IntMatrix> vs;
  for (auto& X : homs) vs.push_back(vectorize(X));
  return unvectorize(span_basis(columns_to_matrix(vs, rows * cols)), rows, cols);
}

}  // namespace

CosetSpace coset_space(const Subgroup& H) {
  CosetSpace cs;
  cs.H = H;
  cs.reps = left_coset_reps(H);
  const auto& G = H.group();
  cs.coset_of.assign(G->order(), -1);
  for (std::size_t c = 0; c < cs.reps.size(); ++c)
    for (int h : H.elements()) cs.coset_of[G->mul(cs.reps[c], h)] = static_cast<int>(c);
  return cs;
}

GLattice::GLattice(GroupPtr G, std::vector<IntMatrix> gen_actions, std::vector<std::string> labels)
    : GLattice(trusted(std::move(G), std::move(gen_actions), std::move(labels))) {
  if (!verify_representation(*this)) throw std::invalid_argument("GLattice: actions do not define a representation");
}

GLattice GLattice::trusted(GroupPtr G, std::vector<IntMatrix> gen_actions, std::vector<std::string> labels) {
  GLattice M;
  if (gen_actions.size() != G->generators().size()) throw std::invalid_argument("GLattice: one matrix per generator");
  M.G_ = std::move(G);
  M.rank_ = gen_actions.empty() ? 0 : gen_actions[0].rows();
  for (auto& A : gen_actions)
    if (A.rows() != M.rank_ || A.cols() != M.rank_) throw DimensionMismatch("GLattice: action matrix shape");
  M.gens_ = std::move(gen_actions);
  if (!labels.empty() && labels.size() != M.rank_) throw std::invalid_argument("GLattice: label count");
  M.labels_ = std::move(labels);
  return M;
}

IntMatrix GLattice::action(int g) const {
  IntMatrix A = IntMatrix::identity(rank_);
  for (int s : G_->word(g)) A = A * gens_[s];
  return A;
}

std::vector<IntMatrix> GLattice::all_actions() const {
  std::vector<IntMatrix> acts(G_->order());
  acts[0] = IntMatrix::identity(rank_);
  for (int x = 1; x < G_->order(); ++x) acts[x] = acts[G_->parent(x)] * gens_[G_->parent_gen(x)];
  return acts;
}

bool verify_representation(const GLattice& M) {
  for (auto& A : M.generator_actions())
    if (!is_unimodular(A)) return false;
  const auto& G = M.group();
  auto acts = M.all_actions();
  for (int x = 0; x < G->order(); ++x)
    for (std::size_t s = 0; s < G->generators().size(); ++s)
      if (acts[x] * M.generator_actions()[s] != acts[G->mul(x, G->generators()[s])]) return false;
  return true;
}

nlohmann::json matrix_to_json(const IntMatrix& A) {
  nlohmann::json data = nlohmann::json::array();
  for (auto& x : A.data()) {
    if (x.fits_slong_p()) data.push_back(x.get_si());
    else data.push_back(x.get_str());
  }
  return {{"rows", A.rows()}, {"cols", A.cols()}, {"data", data}};
}

IntMatrix matrix_from_json(const nlohmann::json& j) {
  std::size_t r = j.at("rows").get<std::size_t>(), c = j.at("cols").get<std::size_t>();
  std::vector<Int> data;
  for (auto& x : j.at("data")) data.push_back(x.is_string() ? Int(x.get<std::string>()) : Int(x.get<long>()));
  return IntMatrix(r, c, std::move(data));
}

nlohmann::json GLattice::to_json() const {
  nlohmann::json acts = nlohmann::json::array();
  for (auto& A : gens_) acts.push_back(matrix_to_json(A));
  nlohmann::json j = {{"rank", rank_}, {"actions", acts}};
  if (!labels_.empty()) j["labels"] = labels_;
  return j;
}

GLattice GLattice::from_json(const GroupPtr& G, const nlohmann::json& j) {
  std::vector<IntMatrix> acts;
  for (auto& a : j.at("actions")) {
    if (a.is_array()) {
      auto rows = a.get<std::vector<std::vector<long>>>();
      acts.push_back(IntMatrix::from_rows(rows));
      if (rows.empty()) acts.back() = IntMatrix(0, 0);
    } else {
      acts.push_back(matrix_from_json(a));
    }
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  GLattice M(G, acts, labels);
  if (j.contains("rank") && j.at("rank").get<std::size_t>() != M.rank())
    throw std::invalid_argument("lattice JSON: rank does not match the action matrices");
  return M;
}

bool is_equivariant(const GLattice& A, const GLattice& B, const IntMatrix& X) {
  if (A.group() != B.group()) return false;
  if (X.rows() != B.rank() || X.cols() != A.rank()) return false;
  for (std::size_t s = 0; s < A.generator_actions().size(); ++s)
    if (B.generator_actions()[s] * X != X * A.generator_actions()[s]) return false;
  return true;
}

GLatticeMap::GLatticeMap(GLattice source, GLattice target, IntMatrix matrix)
    : src_(std::move(source)), tgt_(std::move(target)), mat_(std::move(matrix)) {
  if (mat_.rows() != tgt_.rank() || mat_.cols() != src_.rank()) throw DimensionMismatch("GLatticeMap: matrix shape");
  if (!is_equivariant(src_, tgt_, mat_)) throw NotEquivariant("GLatticeMap: matrix does not intertwine the actions");
}

GLatticeMap GLatticeMap::trusted(GLattice source, GLattice target, IntMatrix matrix) {
  GLatticeMap f;
  f.src_ = std::move(source);
  f.tgt_ = std::move(target);
  f.mat_ = std::move(matrix);
  return f;
}

GLatticeMap GLatticeMap::then(const GLatticeMap& next) const {
  if (next.src_.rank() != tgt_.rank()) throw DimensionMismatch("GLatticeMap::then");
  return trusted(src_, next.tgt_, next.mat_ * mat_);
}

nlohmann::json GLatticeMap::to_json() const {
  return {{"source", src_.to_json()}, {"target", tgt_.to_json()}, {"matrix", matrix_to_json(mat_)}};
}

GLattice trivial_lattice(const GroupPtr& G, std::size_t rank) {
  std::vector<IntMatrix> acts(G->generators().size(), IntMatrix::identity(rank));
  GLattice M = GLattice::trusted(G, acts);
  if (rank == 1) M.set_perm_structure({PermSummand{whole_group(G), 0}});
  return M;
}

GLattice character_lattice(const GroupPtr& G, const std::vector<int>& signs) {
  std::vector<IntMatrix> acts;
  for (int s : signs) {
    if (s != 1 && s != -1) throw std::invalid_argument("character_lattice: values must be +-1");
    acts.push_back(IntMatrix::from_rows({{s}}));
  }
  return GLattice(G, acts);
}

GLattice permutation_lattice(const Subgroup& H) {
  const auto& G = H.group();
  CosetSpace cs = coset_space(H);
  std::vector<IntMatrix> acts;
  for (int s : G->generators()) {
    IntMatrix A(cs.size(), cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c) A(cs.coset_of[G->mul(s, cs.reps[c])], c) = 1;
    acts.push_back(std::move(A));
  }
  std::vector<std::string> labels;
  std::string hname = H.describe();
  for (int r : cs.reps) labels.push_back((r == 0 ? std::string("1") : G->element_name(r)) + hname);
  GLattice M = GLattice::trusted(G, acts, labels);
  M.set_perm_structure({PermSummand{H, 0}});
  return M;
}

GLattice permutation_lattice(const std::vector<Subgroup>& Hs) {
  std::vector<GLattice> parts;
  for (auto& H : Hs) parts.push_back(permutation_lattice(H));
  return direct_sum(parts);
}

GLattice regular_lattice(const GroupPtr& G) { return permutation_lattice(trivial_subgroup(G)); }

GLatticeMap augmentation(const Subgroup& H) { return augmentation(std::vector<Subgroup>{H}); }

GLatticeMap augmentation(const std::vector<Subgroup>& Hs) {
  if (Hs.empty()) throw std::invalid_argument("augmentation: empty family");
  GLattice P = permutation_lattice(Hs);
  IntMatrix e(1, P.rank());
  for (std::size_t j = 0; j < P.rank(); ++j) e(0, j) = 1;
  return GLatticeMap::trusted(P, trivial_lattice(Hs[0].group()), e);
}

GLattice direct_sum(const std::vector<GLattice>& parts) {
  if (parts.empty()) throw std::invalid_argument("direct_sum: no summands");
  const GroupPtr& G = parts[0].group();
  std::vector<IntMatrix> acts;
  for (std::size_t s = 0; s < G->generators().size(); ++s) {
    std::vector<IntMatrix> blocks;
    for (auto& P : parts) {
      require_same_group(G, P.group(), "direct_sum");
      blocks.push_back(P.generator_actions()[s]);
    }
    acts.push_back(IntMatrix::block_diag(blocks));
  }
  std::vector<std::string> labels;
  bool labelled = true;
  for (auto& P : parts) labelled &= (P.labels().size() == P.rank());
  if (labelled)
    for (auto& P : parts) labels.insert(labels.end(), P.labels().begin(), P.labels().end());
  GLattice M = GLattice::trusted(G, acts, labels);
  std::vector<PermSummand> perm;
  std::size_t off = 0;
  bool all_perm = true;
  for (auto& P : parts) {
    if (!P.perm_structure()) {
      all_perm = false;
      break;
    }
    for (auto s : *P.perm_structure()) perm.push_back(PermSummand{s.H, s.offset + off});
    off += P.rank();
  }
  if (all_perm) M.set_perm_structure(perm);
  return M;
}

GLattice dual(const GLattice& M) {
  std::vector<IntMatrix> acts;
  for (auto& A : M.generator_actions()) acts.push_back(inverse_unimodular(A).transpose());
  GLattice D = GLattice::trusted(M.group(), acts, M.labels());
  if (M.perm_structure()) D.set_perm_structure(*M.perm_structure());
  return D;
}

GLattice sublattice(const GLattice& M, const IntMatrix& basis) {
  if (basis.rows() != M.rank()) throw DimensionMismatch("sublattice: basis height");
  if (basis.cols() == 0)
    return GLattice::trusted(M.group(), std::vector<IntMatrix>(M.generator_actions().size(), IntMatrix(0, 0)));
  IntMatrix L = left_inverse(basis);
  std::vector<IntMatrix> acts;
  for (auto& A : M.generator_actions()) {
    IntMatrix AK = A * basis;
    IntMatrix B = L * AK;
    if (basis * B != AK) throw std::invalid_argument("sublattice: span is not G-stable");
    acts.push_back(std::move(B));
  }
  return GLattice::trusted(M.group(), acts);
}

IntMatrix fixed_basis(const GLattice& M, const Subgroup& N) {
  const std::size_t r = M.rank();
  IntMatrix C(0, r);
  for (int n : N.generators()) {
    if (n == 0) continue;
    IntMatrix D = M.action(n) - IntMatrix::identity(r);
    C = IntMatrix::vstack(C, D);
  }
  if (C.rows() == 0) return IntMatrix::identity(r);
  return kernel_basis(C);
}

FixedLattice fixed_lattice(const GLattice& M, const Subgroup& N) {
  FixedLattice out;
  out.inclusion = fixed_basis(M, N);
  if (is_normal(N)) {
    out.lattice = sublattice(M, out.inclusion);
  } else {
    Restriction R = restrict(M, normalizer(N));
    out.lattice = sublattice(R.lattice, out.inclusion);
    out.acting = std::move(R.sub);
  }
  return out;
}

GLattice coinvariant_lattice(const GLattice& M, const Subgroup& N) {
  if (!is_normal(N)) throw NotNormal("coinvariant_lattice: subgroup is not normal");
  return dual(fixed_lattice(dual(M), N).lattice);
}

Restriction restrict(const GLattice& M, const Subgroup& H) {
  Restriction out{GLattice(), as_group(H)};
  std::vector<IntMatrix> acts;
  for (int g : out.sub.group->generators()) acts.push_back(M.action(out.sub.to_parent[g]));
  out.lattice = GLattice::trusted(out.sub.group, acts, M.labels());
  return out;
}

std::vector<IntMatrix> equivariant_homs_generic(const GLattice& A, const GLattice& B) {
  require_same_group(A.group(), B.group(), "equivariant_homs");
  const std::size_t a = A.rank(), b = B.rank(), N = a * b;
  if (N == 0) return {};
  IntMatrix K = IntMatrix::identity(N);
  for (std::size_t s = 0; s < A.generator_actions().size() && K.cols() > 0; ++s) {
    const IntMatrix& RA = A.generator_actions()[s];
    const IntMatrix& RB = B.generator_actions()[s];
    IntMatrix C(N, K.cols());
    for (std::size_t j = 0; j < K.cols(); ++j) {
      IntMatrix X(b, a, K.col(j));
      IntMatrix Y = RB * X - X * RA;
      for (std::size_t i = 0; i < N; ++i) C(i, j) = Y.data()[i];
    }
    IntMatrix k = kernel_basis(C);
    K = k.cols() == 0 ? IntMatrix(N, 0) : K * k;
  }
  if (K.cols() == 0) return {};
  return unvectorize(span_basis(K), b, a);
}

std::vector<IntMatrix> equivariant_homs(const GLattice& A, const GLattice& B) {
  require_same_group(A.group(), B.group(), "equivariant_homs");
  if (A.rank() == 0 || B.rank() == 0) return {};
  if (A.perm_structure()) {
    // Hom_G(Z[G/H], B) = B^H: the base coset may go to any H-fixed vector.
    auto acts = B.all_actions();
    std::vector<IntMatrix> homs;
    for (const auto& summand : *A.perm_structure()) {
      CosetSpace cs = coset_space(summand.H);
      IntMatrix F = fixed_basis(B, summand.H);
      for (std::size_t k = 0; k < F.cols(); ++k) {
        IntMatrix v = F.col_range(k, k + 1);
        IntMatrix X(B.rank(), A.rank());
        for (std::size_t c = 0; c < cs.size(); ++c) X.set_block(0, summand.offset + c, acts[cs.reps[c]] * v);
        homs.push_back(std::move(X));
      }
    }
    return canonical_homs(homs, B.rank(), A.rank());
  }
  if (B.perm_structure()) {
    // Hom_G(M, P) is the transpose of Hom_G(P, M°) since P is self-dual in its basis.
    std::vector<IntMatrix> t;
    for (auto& X : equivariant_homs(B, dual(A))) t.push_back(X.transpose());
    return canonical_homs(t, B.rank(), A.rank());
  }
  return equivariant_homs_generic(A, B);
}

IntMatrix kernel_of(const GLatticeMap& f) {
  if (f.matrix().rows() == 0) return IntMatrix::identity(f.source().rank());
  IntMatrix K = kernel_basis(f.matrix());
  return K.cols() == 0 ? IntMatrix(f.source().rank(), 0) : K;
}

GLattice kernel_lattice(const GLatticeMap& f) { return sublattice(f.source(), kernel_of(f)); }

ExactnessReport check_exact(const std::vector<GLatticeMap>& maps) {
  ExactnessReport rep;
  if (maps.empty()) return rep;
  for (std::size_t i = 0; i + 1 < maps.size(); ++i)
    if (maps[i].target().rank() != maps[i + 1].source().rank()) throw DimensionMismatch("check_exact: maps not composable");
  auto fail = [&](std::size_t junction, std::string why, std::vector<Int> w) {
    rep.exact = false;
    rep.junction = junction;
    rep.failure = std::move(why);
    rep.witness = std::move(w);
    return rep;
  };
  IntMatrix K0 = kernel_of(maps[0]);
  if (K0.cols() > 0) return fail(0, "first map is not injective", K0.col(0));
  for (std::size_t i = 1; i < maps.size(); ++i) {
    const IntMatrix& f = maps[i - 1].matrix();
    const IntMatrix& g = maps[i].matrix();
    IntMatrix gf = g * f;
    for (std::size_t j = 0; j < gf.cols(); ++j)
      if (!gf.col_range(j, j + 1).is_zero()) return fail(i, "composite is not zero", f.col(j));
    IntMatrix K = kernel_of(maps[i]);
    for (std::size_t j = 0; j < K.cols(); ++j)
      if (!span_contains(f, K.col_range(j, j + 1))) return fail(i, "kernel not contained in image", K.col(j));
  }
  const IntMatrix& last = maps.back().matrix();
  std::size_t t = last.rows();
  for (std::size_t j = 0; j < t; ++j) {
    IntMatrix e(t, 1);
    e(j, 0) = 1;
    if (last.cols() == 0 || !span_contains(last, e)) return fail(maps.size(), "last map is not surjective", e.col(0));
  }
  return rep;
}

SplitResult find_section(const GLatticeMap& p) {
  SplitResult out;
  const GLattice& B = p.source();
  const GLattice& C = p.target();
  const std::size_t c = C.rank();
  if (c == 0) {
    out.section = GLatticeMap::trusted(C, B, IntMatrix(B.rank(), 0));
    return out;
  }
  auto homs = equivariant_homs(C, B);
  IntMatrix target = vectorize(IntMatrix::identity(c));
  if (homs.empty()) {
    out.obstruction = SolveObstruction{std::vector<Int>(c * c, 0), 0};
    out.obstruction->y[0] = 1;
    return out;
  }
  std::vector<IntMatrix> cols;
  for (auto& X : homs) cols.push_back(vectorize(p.matrix() * X));
  IntMatrix S = columns_to_matrix(cols, c * c);
  SolveResult r = solve(S, target);
  if (!r) {
    out.obstruction = r.obstruction;
    return out;
  }
  IntMatrix s(B.rank(), c);
  for (std::size_t k = 0; k < homs.size(); ++k)
    if (sgn((*r.x)(k, 0)) != 0) s = s + homs[k].scaled((*r.x)(k, 0));
  if (!(p.matrix() * s).is_identity()) throw std::logic_error("find_section: section check failed");
  out.section = GLatticeMap(C, B, s);
  return out;
}

SplitResult split_exact(const GLatticeMap& i, const GLatticeMap& p) {
  ExactnessReport rep = check_exact({i, p});
  if (!rep.exact) throw NotExact("split_exact: " + rep.failure);
  return find_section(p);
}

std::vector<std::size_t> permutation_character(const GLattice& M) {
  std::vector<std::size_t> chi;
  for (auto& H : subgroups_up_to_conjugacy(M.group(), SubgroupFilter::All)) chi.push_back(fixed_basis(M, H).cols());
  return chi;
}

namespace {

constexpr std::int64_t kPrime = 2147483629;  // largest prime below 2^31

std::int64_t mod_p(const Int& x) {
  Int r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), kPrime);
  return r.get_si();
}

std::int64_t pow_mod(std::int64_t a, std::int64_t e) {
  std::int64_t r = 1;
  a %= kPrime;
  while (e) {
    if (e & 1) r = static_cast<std::int64_t>((__int128)r * a % kPrime);
    a = static_cast<std::int64_t>((__int128)a * a % kPrime);
    e >>= 1;
  }
  return r;
}

std::int64_t det_mod_p(std::vector<std::int64_t> m, std::size_t n) {
  std::int64_t det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv * n + c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[piv * n + j], m[c * n + j]);
      det = kPrime - det;
    }
    det = static_cast<std::int64_t>((__int128)det * m[c * n + c] % kPrime);
    std::int64_t inv = pow_mod(m[c * n + c], kPrime - 2);
    for (std::size_t i = c + 1; i < n; ++i) {
      std::int64_t f = static_cast<std::int64_t>((__int128)m[i * n + c] * inv % kPrime);
      if (!f) continue;
      for (std::size_t j = c; j < n; ++j)
        m[i * n + j] = static_cast<std::int64_t>(((__int128)m[i * n + j] - (__int128)f * m[c * n + j]) % kPrime + kPrime) % kPrime;
    }
  }
  return det % kPrime;
}

}  // namespace

std::optional<GLatticeMap> find_isomorphism(const GLattice& A, const GLattice& B, IsoSearchOptions opt) {
  require_same_group(A.group(), B.group(), "find_isomorphism");
  if (A.rank() != B.rank()) return std::nullopt;
  if (permutation_character(A) != permutation_character(B)) return std::nullopt;
  const std::size_t n = A.rank();
  if (n == 0) return GLatticeMap::trusted(A, B, IntMatrix(0, 0));
  auto homs = equivariant_homs(A, B);
  if (homs.empty()) return std::nullopt;
  const std::size_t k = homs.size();
  std::vector<std::vector<std::int64_t>> red(k, std::vector<std::int64_t>(n * n));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t e = 0; e < n * n; ++e) red[i][e] = mod_p(homs[i].data()[e]);

  std::size_t tries = 0;
  std::optional<GLatticeMap> found;
  auto test = [&](const std::vector<long>& c) {
    ++tries;
    std::vector<std::int64_t> m(n * n, 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (!c[i]) continue;
      std::int64_t ci = (c[i] % kPrime + kPrime) % kPrime;
      for (std::size_t e = 0; e < n * n; ++e) m[e] = static_cast<std::int64_t>((m[e] + (__int128)ci * red[i][e]) % kPrime);
    }
    std::int64_t d = det_mod_p(std::move(m), n);
    if (d != 1 && d != kPrime - 1) return false;
    IntMatrix X(n, n);
    for (std::size_t i = 0; i < k; ++i)
      if (c[i]) X = X + homs[i].scaled(c[i]);
    if (!is_unimodular(X)) return false;
    found = GLatticeMap(A, B, X);
    return true;
  };

  // Coefficient vectors by increasing L1 norm, then seeded random fill-in.
  std::vector<long> c(k, 0);
  std::function<bool(std::size_t, long)> rec = [&](std::size_t pos, long left) -> bool {
    if (tries >= opt.max_tries) return false;
    if (left == 0) return test(c);
    if (pos == k) return false;
    for (long v = 0; v <= std::min(left, opt.bound); ++v) {
      for (int sign : {1, -1}) {
        if (v == 0 && sign == -1) continue;
        c[pos] = sign * v;
        if (rec(pos + 1, left - v)) return true;
        if (tries >= opt.max_tries) return false;
      }
    }
    c[pos] = 0;
    return false;
  };
  for (long t = 1; t <= static_cast<long>(k) * opt.bound && tries < opt.max_tries; ++t) {
    std::fill(c.begin(), c.end(), 0);
    if (rec(0, t)) return found;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<long> dist(-opt.bound, opt.bound);
  while (tries < opt.max_tries) {
    for (auto& x : c) x = dist(rng);
    if (test(c)) return found;
  }
  throw SearchExhausted("find_isomorphism: no unimodular equivariant map found within the search bound");
}

bool is_stably_permutation_witness(const GLattice& M, const GLattice& addend, const GLattice& target,
                                   IsoSearchOptions opt) {
  auto iso = find_isomorphism(direct_sum({M, addend}), target, opt);
  return iso.has_value();
}

}  // namespace torus
