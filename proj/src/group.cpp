#include "torus/group.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace torus {

namespace {

constexpr int kTableLimit = 2048;

Perm compose(const Perm& a, const Perm& b) {  // (a*b)(i) = a(b(i))
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

Perm inverse_perm(const Perm& a) {
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[a[i]] = static_cast<std::uint32_t>(i);
  return c;
}

long perm_order(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  long ord = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    long len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) seen[j] = 1, ++len;
    ord = std::lcm(ord, len);
  }
  return ord;
}

Perm identity_perm(std::size_t d) {
  Perm p(d);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

std::vector<std::string> disambiguate(const std::vector<std::vector<std::string>>& parts) {
  std::vector<std::string> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::set<std::string> uniq(all.begin(), all.end());
  if (uniq.size() == all.size()) return all;
  all.clear();
  for (std::size_t f = 0; f < parts.size(); ++f)
    for (auto& n : parts[f]) all.push_back(n + std::to_string(f + 1));
  return all;
}

}  // namespace

long max_group_order() {
  if (const char* env = std::getenv("TORUS_MAX_ORDER")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 20000;
}

std::string to_string(GroupKind k) {
  switch (k) {
    case GroupKind::Cyclic: return "cyclic";
    case GroupKind::Dihedral: return "dihedral";
    case GroupKind::Product: return "product";
    case GroupKind::Semidirect: return "semidirect";
    case GroupKind::Permutation: return "permutation";
    case GroupKind::Quotient: return "quotient";
  }
  return "?";
}

std::size_t FiniteGroup::PermHash::operator()(const Perm& p) const {
  std::size_t h = 1469598103934665603ull;
  for (auto x : p) h = (h ^ x) * 1099511628211ull;
  return h;
}

FiniteGroup::FiniteGroup(std::size_t degree, std::vector<Perm> gens, std::vector<std::string> names,
                         GroupKind kind, long param, long bound)
    : degree_(degree), names_(std::move(names)), kind_(kind), param_(param) {
  if (names_.size() != gens.size()) throw InvalidPresentation("generator name count mismatch");
  for (auto& g : gens)
    if (g.size() != degree) throw InvalidPresentation("generator degree mismatch");
  const std::size_t k = gens.size();
  std::vector<int> right;  // right[x*k + s] = x * gens[s]
  perms_.push_back(identity_perm(degree));
  index_.emplace(perms_[0], 0);
  parent_.push_back(-1);
  parent_gen_.push_back(-1);
  for (std::size_t x = 0; x < perms_.size(); ++x) {
    for (std::size_t s = 0; s < k; ++s) {
      Perm y = compose(perms_[x], gens[s]);
      auto it = index_.find(y);
      int id;
      if (it == index_.end()) {
        id = static_cast<int>(perms_.size());
        if (static_cast<long>(perms_.size()) + 1 > bound)
          throw OrderOverflow("group order exceeds bound " + std::to_string(bound));
        index_.emplace(y, id);
        perms_.push_back(std::move(y));
        parent_.push_back(static_cast<int>(x));
        parent_gen_.push_back(static_cast<int>(s));
      } else {
        id = it->second;
      }
      right.push_back(id);
    }
  }
  for (auto& g : gens) gens_.push_back(index_.at(g));
  const int n = order();
  if (n <= kTableLimit) {
    table_.assign(static_cast<std::size_t>(n) * n, 0);
    for (int a = 0; a < n; ++a) {
      table_[static_cast<std::size_t>(a) * n] = a;
      for (int b = 1; b < n; ++b) {
        int ab_parent = table_[static_cast<std::size_t>(a) * n + parent_[b]];
        table_[static_cast<std::size_t>(a) * n + b] = right[static_cast<std::size_t>(ab_parent) * k + parent_gen_[b]];
      }
    }
  }
  inv_.resize(n);
  elem_order_.resize(n);
  for (int a = 0; a < n; ++a) {
    inv_[a] = index_.at(inverse_perm(perms_[a]));
    elem_order_[a] = static_cast<int>(perm_order(perms_[a]));
  }
}

int FiniteGroup::mul(int a, int b) const {
  if (!table_.empty()) return table_[static_cast<std::size_t>(a) * order() + b];
  return index_.at(compose(perms_[a], perms_[b]));
}

int FiniteGroup::power(int g, long k) const {
  long n = element_order(g);
  k %= n;
  if (k < 0) k += n;
  int r = 0, base = g;
  while (k) {
    if (k & 1) r = mul(r, base);
    base = mul(base, base);
    k >>= 1;
  }
  return r;
}

int FiniteGroup::find(const Perm& p) const {
  auto it = index_.find(p);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> FiniteGroup::word(int g) const {
  std::vector<int> w;
  for (int x = g; x != 0; x = parent_[x]) w.push_back(parent_gen_[x]);
  std::reverse(w.begin(), w.end());
  return w;
}

std::string FiniteGroup::element_name(int g) const {
  std::vector<int> w = word(g);
  if (w.empty()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (i) os << ' ';
    os << names_[w[i]];
    if (j - i > 1) os << '^' << (j - i);
    i = j;
  }
  return os.str();
}

int FiniteGroup::parse_element(const std::string& text) const {
  std::string s = text;
  std::replace(s.begin(), s.end(), '*', ' ');
  std::istringstream is(s);
  std::string tok;
  int g = 0;
  while (is >> tok) {
    if (tok == "1" || tok == "e") continue;
    std::string name = tok;
    long e = 1;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      name = tok.substr(0, caret);
      try {
        std::size_t used = 0;
        e = std::stol(tok.substr(caret + 1), &used);
        if (used != tok.size() - caret - 1) throw std::invalid_argument("exponent");
      } catch (const std::exception&) {
        throw InvalidPresentation("bad exponent in element word '" + text + "'");
      }
    }
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InvalidPresentation("unknown generator '" + name + "' in '" + text + "'");
    g = mul(g, power(gens_[it - names_.begin()], e));
  }
  return g;
}

GroupPtr make_cyclic(long n) {
  if (n <= 0) throw InvalidPresentation("cyclic: n must be positive");
  if (n > max_group_order()) throw OrderOverflow("cyclic group order exceeds bound");
  // Disjoint cycles of prime-power lengths keep the degree small.
  Perm gen;
  long m = n;
  for (long p = 2; p * p <= m || m > 1; ++p) {
    if (p * p > m) p = m;
    if (m % p) continue;
    long q = 1;
    while (m % p == 0) m /= p, q *= p;
    std::size_t base = gen.size();
    for (long i = 0; i < q; ++i) gen.push_back(static_cast<std::uint32_t>(base + (i + 1) % q));
  }
  if (gen.empty()) gen.push_back(0);
  auto G = std::make_shared<FiniteGroup>(gen.size(), std::vector<Perm>{gen}, std::vector<std::string>{"s"},
                                         GroupKind::Cyclic, n, max_group_order());
  G->spec = {{"kind", "cyclic"}, {"n", n}};
  return G;
}

GroupPtr make_dihedral(long n) {
  if (n <= 0) throw InvalidPresentation("dihedral: n must be positive");
  if (2 * n > max_group_order()) throw OrderOverflow("dihedral group order exceeds bound");
  Perm s, t;
  if (n == 1) {
    s = {0, 1};
    t = {1, 0};
  } else if (n == 2) {
    s = {1, 0, 3, 2};
    t = {2, 3, 0, 1};
  } else {
    for (long i = 0; i < n; ++i) {
      s.push_back(static_cast<std::uint32_t>((i + 1) % n));
      t.push_back(static_cast<std::uint32_t>((n - i) % n));
    }
  }
  auto G = std::make_shared<FiniteGroup>(s.size(), std::vector<Perm>{s, t}, std::vector<std::string>{"s", "t"},
                                         GroupKind::Dihedral, n, max_group_order());
  if (G->order() != 2 * n) throw InvalidPresentation("dihedral construction failed");
  G->spec = {{"kind", "dihedral"}, {"n", n}};
  return G;
}

GroupPtr make_product(const std::vector<GroupPtr>& factors) {
  if (factors.empty()) throw InvalidPresentation("product: no factors");
  long ord = 1;
  for (auto& f : factors) {
    ord *= f->order();
    if (ord > max_group_order()) throw OrderOverflow("product order exceeds bound");
  }
  std::size_t degree = 0;
  for (auto& f : factors) degree += f->degree();
  std::vector<Perm> gens;
  std::vector<std::vector<std::string>> names;
  std::size_t off = 0;
  for (auto& f : factors) {
    for (int g : f->generators()) {
      Perm p = identity_perm(degree);
      const Perm& q = f->perm(g);
      for (std::size_t i = 0; i < q.size(); ++i) p[off + i] = static_cast<std::uint32_t>(off + q[i]);
      gens.push_back(std::move(p));
    }
    names.push_back(f->generator_names());
    off += f->degree();
  }
  auto G = std::make_shared<FiniteGroup>(degree, gens, disambiguate(names), GroupKind::Product, 0, max_group_order());
  nlohmann::json fs = nlohmann::json::array();
  for (auto& f : factors) fs.push_back(f->spec);
  G->spec = {{"kind", "product"}, {"factors", fs}};
  return G;
}

GroupPtr make_semidirect(const GroupPtr& N, const GroupPtr& Q, const std::vector<std::vector<int>>& action) {
  const int nN = N->order(), nQ = Q->order();
  if (static_cast<long>(nN) * nQ > max_group_order()) throw OrderOverflow("semidirect order exceeds bound");
  const auto& ngens = N->generators();
  const auto& qgens = Q->generators();
  if (action.size() != qgens.size()) throw InvalidPresentation("semidirect: one action entry per quotient generator");
  // Extend each generator image list to an endomorphism of N and check it is an automorphism.
  std::vector<std::vector<int>> phi(qgens.size(), std::vector<int>(nN));
  for (std::size_t i = 0; i < qgens.size(); ++i) {
    if (action[i].size() != ngens.size()) throw InvalidPresentation("semidirect: image count mismatch");
    auto& f = phi[i];
    f[0] = 0;
    for (int x = 1; x < nN; ++x) f[x] = N->mul(f[N->parent(x)], action[i][N->parent_gen(x)]);
    for (int x = 0; x < nN; ++x)
      for (std::size_t s = 0; s < ngens.size(); ++s)
        if (f[N->mul(x, ngens[s])] != N->mul(f[x], action[i][s]))
          throw InvalidPresentation("semidirect: generator images do not define a homomorphism of N");
    std::vector<char> hit(nN, 0);
    for (int x = 0; x < nN; ++x) hit[f[x]] = 1;
    if (std::count(hit.begin(), hit.end(), 1) != nN) throw InvalidPresentation("semidirect: action not bijective");
  }
  // The assignment must extend to a homomorphism Q -> Aut(N).
  std::vector<std::vector<int>> alpha(nQ, std::vector<int>(nN));
  std::iota(alpha[0].begin(), alpha[0].end(), 0);
  for (int q = 1; q < nQ; ++q) {
    const auto& a = alpha[Q->parent(q)];
    const auto& f = phi[Q->parent_gen(q)];
    for (int x = 0; x < nN; ++x) alpha[q][x] = a[f[x]];
  }
  for (int q = 0; q < nQ; ++q)
    for (std::size_t s = 0; s < qgens.size(); ++s) {
      const auto& lhs = alpha[Q->mul(q, qgens[s])];
      for (int x = 0; x < nN; ++x)
        if (lhs[x] != alpha[q][phi[s][x]])
          throw InvalidPresentation("semidirect: action does not respect the relations of the quotient");
    }
  std::size_t degree = nN + Q->degree();
  std::vector<Perm> gens;
  for (int g : ngens) {
    Perm p = identity_perm(degree);
    for (int x = 0; x < nN; ++x) p[x] = static_cast<std::uint32_t>(N->mul(g, x));
    gens.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < qgens.size(); ++i) {
    Perm p = identity_perm(degree);
    for (int x = 0; x < nN; ++x) p[x] = static_cast<std::uint32_t>(phi[i][x]);
    const Perm& qp = Q->perm(qgens[i]);
    for (std::size_t j = 0; j < qp.size(); ++j) p[nN + j] = static_cast<std::uint32_t>(nN + qp[j]);
    gens.push_back(std::move(p));
  }
  auto G = std::make_shared<FiniteGroup>(degree, gens, disambiguate({N->generator_names(), Q->generator_names()}),
                                         GroupKind::Semidirect, 0, max_group_order());
  if (G->order() != nN * nQ) throw InvalidPresentation("semidirect: unexpected order");
  return G;
}

GroupPtr make_permutation_group(std::size_t degree, const std::vector<Perm>& gens) {
  for (auto& g : gens) {
    if (g.size() != degree) throw InvalidPresentation("permutation: wrong length");
    std::vector<char> seen(degree, 0);
    for (auto x : g) {
      if (x >= degree || seen[x]) throw InvalidPresentation("permutation: not a bijection");
      seen[x] = 1;
    }
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < gens.size(); ++i) names.push_back("g" + std::to_string(i + 1));
  std::vector<Perm> gs = gens;
  if (gs.empty()) gs.push_back(identity_perm(std::max<std::size_t>(degree, 1))), names.push_back("g1");
  return std::make_shared<FiniteGroup>(gs[0].size(), gs, names, GroupKind::Permutation, 0, max_group_order());
}

namespace {

GroupPtr rename(const GroupPtr& G, const nlohmann::json& spec) {
  if (!spec.contains("names")) return G;
  auto names = spec.at("names").get<std::vector<std::string>>();
  if (names.size() != G->generators().size()) throw InvalidPresentation("names: wrong count");
  std::vector<Perm> gens;
  for (int g : G->generators()) gens.push_back(G->perm(g));
  auto H = std::make_shared<FiniteGroup>(G->degree(), gens, names, G->kind(), G->param(), max_group_order());
  H->spec = G->spec;
  return H;
}

}  // namespace

GroupPtr make_group(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind")) throw InvalidPresentation("group spec needs a kind");
  std::string kind = spec.at("kind").get<std::string>();
  GroupPtr G;
  if (kind == "cyclic") {
    G = make_cyclic(spec.at("n").get<long>());
  } else if (kind == "dihedral") {
    G = make_dihedral(spec.at("n").get<long>());
  } else if (kind == "product") {
    std::vector<GroupPtr> fs;
    for (auto& f : spec.at("factors")) fs.push_back(make_group(f));
    G = make_product(fs);
  } else if (kind == "semidirect") {
    GroupPtr N = make_group(spec.at("normal"));
    GroupPtr Q = make_group(spec.at("quotient"));
    std::vector<std::vector<int>> action(Q->generators().size());
    for (std::size_t i = 0; i < action.size(); ++i) action[i] = N->generators();  // unspecified: trivial
    for (auto& entry : spec.at("action")) {
      if (!entry.is_array() || entry.size() != 2) throw InvalidPresentation("action entries are [gen_index, images]");
      std::size_t qi = entry[0].get<std::size_t>();
      if (qi >= action.size()) throw InvalidPresentation("action: quotient generator index out of range");
      std::vector<std::string> words;
      if (entry[1].is_string()) words.push_back(entry[1].get<std::string>());
      else words = entry[1].get<std::vector<std::string>>();
      if (words.size() != N->generators().size()) throw InvalidPresentation("action: one image per normal generator");
      for (std::size_t k = 0; k < words.size(); ++k) action[qi][k] = N->parse_element(words[k]);
    }
    G = make_semidirect(N, Q, action);
  } else if (kind == "permutation") {
    std::size_t degree = spec.at("degree").get<std::size_t>();
    auto raw = spec.at("generators").get<std::vector<std::vector<long>>>();
    bool zero_based = false;
    for (auto& g : raw)
      for (long x : g) zero_based |= (x == 0);
    std::vector<Perm> gens;
    for (auto& g : raw) {
      Perm p;
      for (long x : g) {
        long v = zero_based ? x : x - 1;
        if (v < 0) throw InvalidPresentation("permutation: negative point");
        p.push_back(static_cast<std::uint32_t>(v));
      }
      gens.push_back(std::move(p));
    }
    G = make_permutation_group(degree, gens);
  } else {
    throw InvalidPresentation("unknown group kind '" + kind + "'");
  }
  G = rename(G, spec);
  auto M = std::const_pointer_cast<FiniteGroup>(G);
  M->spec = spec;
  return G;
}

// ---------------------------------------------------------------- subgroups

Subgroup::Subgroup(GroupPtr g, std::vector<int> gens) : G_(std::move(g)), gens_(std::move(gens)) {
  const int n = G_->order();
  member_.assign(n, 0);
  std::vector<int> elems{0};
  member_[0] = 1;
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (int s : gens_) {
      int y = G_->mul(elems[i], s);
      if (!member_[y]) member_[y] = 1, elems.push_back(y);
    }
  std::sort(elems.begin(), elems.end());
  elems_ = std::move(elems);
  if (n % order() != 0) throw std::logic_error("Lagrange violated");
}

bool Subgroup::contains(const Subgroup& K) const {
  for (int x : K.elements())
    if (!contains(x)) return false;
  return true;
}

bool Subgroup::operator<(const Subgroup& o) const {
  if (order() != o.order()) return order() < o.order();
  return elems_ < o.elems_;
}

std::string Subgroup::describe() const {
  std::vector<int> gs = small_generating_set(*this);
  if (gs.empty()) return "<1>";
  std::string s = "<";
  for (std::size_t i = 0; i < gs.size(); ++i) s += (i ? ", " : "") + G_->element_name(gs[i]);
  return s + ">";
}

std::vector<int> small_generating_set(const Subgroup& H) {
  if (auto c = cyclic_generator(H); c && *c != 0) {
    // Prefer the generator with the shortest word.
    int best = *c;
    for (int x : H.elements())
      if (H.group()->element_order(x) == H.order()) {
        best = x;
        break;
      }
    return {best};
  }
  std::vector<int> gens;
  if (H.order() == 1) return gens;
  Subgroup cur(H.group(), {});
  for (int x : H.elements()) {
    if (cur.contains(x)) continue;
    gens.push_back(x);
    cur = Subgroup(H.group(), gens);
    if (cur.order() == H.order()) break;
  }
  return gens;
}

Subgroup trivial_subgroup(const GroupPtr& G) { return Subgroup(G, {}); }
Subgroup whole_group(const GroupPtr& G) { return Subgroup(G, G->generators()); }

Subgroup conjugate(const Subgroup& H, int g) {
  std::vector<int> gens;
  for (int h : H.generators()) gens.push_back(H.group()->conj(g, h));
  return Subgroup(H.group(), gens);
}

Subgroup intersection(const Subgroup& A, const Subgroup& B) {
  std::vector<int> common;
  for (int x : A.elements())
    if (B.contains(x)) common.push_back(x);
  return Subgroup(A.group(), common);
}

Subgroup join(const Subgroup& A, const Subgroup& B) {
  std::vector<int> gens = A.generators();
  gens.insert(gens.end(), B.generators().begin(), B.generators().end());
  return Subgroup(A.group(), gens);
}

bool is_normal(const Subgroup& H) {
  const auto& G = H.group();
  for (int g : G->generators())
    for (int h : H.generators())
      if (!H.contains(G->conj(g, h))) return false;
  return true;
}

std::optional<int> cyclic_generator(const Subgroup& H) {
  for (int x : H.elements())
    if (H.group()->element_order(x) == H.order()) return x;
  return std::nullopt;
}

bool is_cyclic(const Subgroup& H) { return cyclic_generator(H).has_value(); }

std::vector<long> prime_factors(long n) {
  std::vector<long> ps;
  for (long p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

long p_part(long n, long p) {
  long q = 1;
  while (n % p == 0) n /= p, q *= p;
  return q;
}

bool is_p_group(const Subgroup& H, long* p) {
  auto ps = prime_factors(H.order());
  if (ps.size() > 1) return false;
  if (p) *p = ps.empty() ? 1 : ps[0];
  return true;
}

bool product_is_whole(const Subgroup& A, const Subgroup& B) {
  long inter = intersection(A, B).order();
  return static_cast<long>(A.order()) * B.order() == inter * A.group()->order();
}

Subgroup conjugacy_class_min(const Subgroup& H) {
  const auto& G = H.group();
  int best_g = 0;
  std::vector<int> best = H.elements();
  std::vector<int> cur(H.order());
  for (int g = 1; g < G->order(); ++g) {
    for (int i = 0; i < H.order(); ++i) cur[i] = G->conj(g, H.elements()[i]);
    std::sort(cur.begin(), cur.end());
    if (cur < best) best = cur, best_g = g;
  }
  return best_g == 0 ? H : conjugate(H, best_g);
}

bool are_conjugate(const Subgroup& A, const Subgroup& B) {
  if (A.order() != B.order()) return false;
  return conjugacy_class_min(A) == conjugacy_class_min(B);
}

Subgroup sylow_in(const Subgroup& H, long p) {
  if (H.order() % p != 0) throw NotADivisor("sylow: p does not divide the group order");
  const auto& G = H.group();
  long target = p_part(H.order(), p);
  Subgroup P = trivial_subgroup(G);
  std::vector<int> pel;
  for (int x : H.elements())
    if (x != 0 && p_part(G->element_order(x), p) == G->element_order(x)) pel.push_back(x);
  while (P.order() < target) {
    bool grown = false;
    for (int x : pel) {
      if (P.contains(x)) continue;
      bool normalizes = true;
      for (int h : P.generators())
        if (!P.contains(G->conj(x, h))) {
          normalizes = false;
          break;
        }
      if (!normalizes) continue;
      std::vector<int> gens = P.generators();
      gens.push_back(x);
      P = Subgroup(G, gens);
      grown = true;
      break;
    }
    if (!grown) throw std::logic_error("sylow: search stalled");
  }
  return P;
}

Subgroup sylow(const GroupPtr& G, long p) { return sylow_in(whole_group(G), p); }

Subgroup normal_core(const Subgroup& H) {
  const auto& G = H.group();
  std::vector<char> keep(G->order(), 0);
  for (int x : H.elements()) keep[x] = 1;
  for (int g = 0; g < G->order(); ++g) {
    int gi = G->inv(g);
    for (int x : H.elements())
      if (keep[x] && !H.contains(G->conj(gi, x))) keep[x] = 0;  // x in gHg^-1 iff g^-1 x g in H
  }
  std::vector<int> core;
  for (int x : H.elements())
    if (keep[x]) core.push_back(x);
  return Subgroup(G, core);
}

Subgroup normalizer(const Subgroup& H) {
  const auto& G = H.group();
  std::vector<int> nz;
  for (int g = 0; g < G->order(); ++g) {
    bool ok = true;
    for (int h : H.generators())
      if (!H.contains(G->conj(g, h))) {
        ok = false;
        break;
      }
    if (ok) nz.push_back(g);
  }
  return Subgroup(G, nz);
}

Subgroup multiset_core(const std::vector<Subgroup>& members) {
  if (members.empty()) throw std::invalid_argument("multiset_core: empty multiset");
  Subgroup core = normal_core(members[0]);
  for (std::size_t i = 1; i < members.size(); ++i) core = intersection(core, normal_core(members[i]));
  return core;
}

std::vector<int> double_cosets(const Subgroup& P, const Subgroup& H) {
  const auto& G = P.group();
  std::vector<char> seen(G->order(), 0);
  std::vector<int> reps;
  for (int g = 0; g < G->order(); ++g) {
    if (seen[g]) continue;
    reps.push_back(g);
    for (int p : P.elements()) {
      int pg = G->mul(p, g);
      for (int h : H.elements()) seen[G->mul(pg, h)] = 1;
    }
  }
  return reps;
}

std::vector<int> left_coset_reps(const Subgroup& H) {
  const auto& G = H.group();
  std::vector<char> seen(G->order(), 0);
  std::vector<int> reps;
  for (int g = 0; g < G->order(); ++g) {
    if (seen[g]) continue;
    reps.push_back(g);
    for (int h : H.elements()) seen[G->mul(g, h)] = 1;
  }
  return reps;
}

namespace {

std::vector<Subgroup> enumerate_subgroups(const GroupPtr& G, const std::vector<int>& ambient) {
  std::set<std::vector<int>> seen;
  std::vector<Subgroup> out;
  std::vector<Subgroup> cyclic;
  for (int x : ambient) {
    Subgroup C(G, {x});
    if (seen.insert(C.elements()).second) {
      out.push_back(C);
      cyclic.push_back(C);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& C : cyclic) {
      if (out[i].contains(C.generators()[0])) continue;
      Subgroup J = join(out[i], C);
      if (seen.insert(J.elements()).second) out.push_back(J);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Subgroup> all_subgroups(const GroupPtr& G) {
  std::vector<int> all(G->order());
  std::iota(all.begin(), all.end(), 0);
  return enumerate_subgroups(G, all);
}

std::vector<Subgroup> subgroups_of(const Subgroup& H) { return enumerate_subgroups(H.group(), H.elements()); }

std::vector<Subgroup> subgroups_up_to_conjugacy(const GroupPtr& G, SubgroupFilter filter) {
  if (G->order() > max_group_order()) throw OrderOverflow("subgroup enumeration bound exceeded");
  std::vector<Subgroup> pool;
  if (filter == SubgroupFilter::All) {
    pool = all_subgroups(G);
  } else {
    pool.push_back(trivial_subgroup(G));
    for (long p : prime_factors(G->order())) {
      auto subs = subgroups_of(sylow(G, p));
      pool.insert(pool.end(), subs.begin(), subs.end());
    }
  }
  std::set<std::vector<int>> seen;
  std::vector<Subgroup> reps;
  for (const auto& H : pool) {
    Subgroup m = conjugacy_class_min(H);
    if (seen.insert(m.elements()).second) reps.push_back(m);
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

// ---------------------------------------------------------------- quotients

Subgroup Quotient::image(const Subgroup& H) const {
  std::vector<int> gens;
  for (int h : H.generators()) gens.push_back(proj[h]);
  return Subgroup(Q, gens);
}

Subgroup Quotient::preimage(const Subgroup& K) const {
  std::vector<int> gens = N.generators();
  const auto& G = N.group();
  for (int k : K.generators())
    for (int g = 0; g < G->order(); ++g)
      if (proj[g] == k) {
        gens.push_back(g);
        break;
      }
  return Subgroup(G, gens);
}

Quotient quotient_group(const Subgroup& N) {
  if (!is_normal(N)) throw NotNormal("quotient_group: subgroup is not normal");
  const auto& G = N.group();
  std::vector<int> reps = left_coset_reps(N);
  std::vector<int> cidx(G->order(), -1);
  for (std::size_t c = 0; c < reps.size(); ++c)
    for (int n : N.elements()) cidx[G->mul(reps[c], n)] = static_cast<int>(c);
  std::vector<Perm> gens;
  for (int s : G->generators()) {
    Perm p(reps.size());
    for (std::size_t c = 0; c < reps.size(); ++c) p[c] = static_cast<std::uint32_t>(cidx[G->mul(s, reps[c])]);
    gens.push_back(std::move(p));
  }
  Quotient q;
  q.N = N;
  q.Q = std::make_shared<FiniteGroup>(reps.size(), gens, G->generator_names(), GroupKind::Quotient, 0,
                                      max_group_order());
  q.proj.assign(G->order(), 0);
  const auto& qg = q.Q->generators();
  for (int g = 1; g < G->order(); ++g) q.proj[g] = q.Q->mul(q.proj[G->parent(g)], qg[G->parent_gen(g)]);
  return q;
}

std::optional<std::pair<int, int>> dihedral_generators(const GroupPtr& G) {
  if (G->kind() == GroupKind::Dihedral) return std::make_pair(G->generators()[0], G->generators()[1]);
  if (G->order() % 2) return std::nullopt;
  const int n = G->order() / 2;
  for (int s = 0; s < G->order(); ++s) {
    if (G->element_order(s) != n) continue;
    Subgroup S(G, {s});
    for (int t = 0; t < G->order(); ++t) {
      if (S.contains(t) || G->element_order(t) != 2) continue;
      if (G->conj(t, s) == G->inv(s)) return std::make_pair(s, t);
    }
  }
  return std::nullopt;
}

SubgroupAsGroup as_group(const Subgroup& H) {
  const auto& G = H.group();
  std::vector<Perm> gens;
  std::vector<std::string> names;
  for (int h : H.generators())
    if (h != 0 && std::find(gens.begin(), gens.end(), G->perm(h)) == gens.end()) {
      gens.push_back(G->perm(h));
      names.push_back("h" + std::to_string(gens.size()));
    }
  if (gens.empty()) gens.push_back(G->perm(0)), names.push_back("h1");
  SubgroupAsGroup out;
  out.parent = G;
  out.group = std::make_shared<FiniteGroup>(G->degree(), gens, names, GroupKind::Permutation, 0, max_group_order());
  out.to_parent.resize(out.group->order());
  out.from_parent.assign(G->order(), -1);
  for (int x = 0; x < out.group->order(); ++x) {
    int y = G->find(out.group->perm(x));
    out.to_parent[x] = y;
    out.from_parent[y] = x;
  }
  return out;
}

Subgroup localize(const SubgroupAsGroup& A, const Subgroup& K) {
  std::vector<int> loc;
  for (int x : K.elements()) {
    if (A.from_parent[x] < 0) throw std::invalid_argument("localize: element outside the subgroup");
    loc.push_back(A.from_parent[x]);
  }
  return Subgroup(A.group, loc);
}

Subgroup globalize(const SubgroupAsGroup& A, const Subgroup& K) {
  std::vector<int> par;
  for (int x : K.elements()) par.push_back(A.to_parent[x]);
  return Subgroup(A.parent, par);
}

bool all_sylow_cyclic(const GroupPtr& G) {
  for (long p : prime_factors(G->order()))
    if (!is_cyclic(sylow(G, p))) return false;
  return true;
}

bool is_nilpotent(const GroupPtr& G) {
  for (long p : prime_factors(G->order()))
    if (!is_normal(sylow(G, p))) return false;
  return true;
}

}  // namespace torus
