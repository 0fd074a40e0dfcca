#include "torus/multinorm.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace torus {

namespace {

long index_of(const Subgroup& H) { return H.group()->order() / H.order(); }

long gcd_all(const std::vector<long>& v) {
  long g = 0;
  for (long x : v) g = std::gcd(g, x);
  return g;
}

// Basis layout of the cover: one block of (G:H) coset vectors per copy.
struct Layout {
  std::vector<Subgroup> subs;
  std::vector<long> weights;
  std::vector<std::size_t> offset;
  std::vector<CosetSpace> cosets;
  std::size_t total = 0;
};

Layout layout_of(const WeightedMultiset& ms) {
  Layout L;
  for (const auto& m : ms.members()) {
    CosetSpace cs = coset_space(m.H);
    for (long w : m.weights) {
      L.subs.push_back(m.H);
      L.weights.push_back(w);
      L.offset.push_back(L.total);
      L.cosets.push_back(cs);
      L.total += cs.size();
    }
  }
  return L;
}

struct Placed {
  WeightedMultiset ms;
  std::vector<std::size_t> pos;  // input copy -> copy index in ms
};

// Builds a multiset from copies in creation order and records where each copy lands.
Placed place_copies(const GroupPtr& G, const std::vector<std::pair<Subgroup, long>>& copies) {
  std::vector<Member> mem;
  for (auto& [H, w] : copies) {
    auto it = std::find_if(mem.begin(), mem.end(), [&](const Member& m) { return m.H == H; });
    if (it == mem.end())
      mem.push_back(Member{H, {w}});
    else
      it->weights.push_back(w);
  }
  Placed out{WeightedMultiset(G, mem), std::vector<std::size_t>(copies.size())};
  std::size_t base = 0;
  for (const auto& m : out.ms.members()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < copies.size(); ++i)
      if (copies[i].first == m.H) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return copies[a].second < copies[b].second; });
    for (std::size_t r = 0; r < idx.size(); ++r) out.pos[idx[r]] = base + r;
    base += m.weights.size();
  }
  return out;
}

void check_witness(IsoWitness& w, const char* what) {
  if (w.source.rank() > kWitnessVerifyRank) return;
  if (!w.verify()) throw std::logic_error(std::string(what) + ": witness failed verification");
  w.verified = true;
}

IntMatrix permutation_matrix_from_columns(const std::vector<std::size_t>& image, std::size_t n) {
  IntMatrix P(n, n);
  for (std::size_t j = 0; j < image.size(); ++j) P(image[j], j) = 1;
  return P;
}

std::string weight_text(const std::vector<long>& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + ")";
}

std::vector<int> member_generators(const Subgroup& H) { return small_generating_set(H); }

// Composes single steps; step k maps I_{k-1} -> I_k (+) Z[G/S_k].
Reduction chain(const WeightedMultiset& start, const std::vector<Reduction>& steps) {
  Reduction out;
  out.before = start;
  MultinormLattice I0 = build_I(start);
  if (steps.empty()) {
    out.after = start;
    out.witness = IsoWitness{I0.lattice, I0.lattice, IntMatrix::identity(I0.lattice.rank()), false};
    check_witness(out.witness, "chain");
    return out;
  }
  IntMatrix W = IntMatrix::identity(I0.lattice.rank());
  std::size_t tail = 0;  // ranks of the summands split off so far
  std::vector<std::size_t> sizes;
  for (const auto& s : steps) {
    W = IntMatrix::block_diag(s.witness.matrix, IntMatrix::identity(tail)) * W;
    std::size_t r = 0;
    for (auto& H : s.summands) r += static_cast<std::size_t>(index_of(H));
    sizes.push_back(r);
    tail += r;
    for (auto& H : s.summands) out.summands.push_back(H);
    for (auto& t : s.steps) out.steps.push_back(t);
  }
  out.after = steps.back().after;
  // Current order: I_n, S_n, ..., S_1. Reorder to I_n, S_1, ..., S_n.
  const std::size_t rn = steps.back().witness.target.rank() - sizes.back();
  const std::size_t n = rn + tail;
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < rn; ++i) image[i] = i;
  std::vector<std::size_t> cur_off(steps.size()), new_off(steps.size());
  std::size_t c = rn;
  for (std::size_t k = steps.size(); k-- > 0;) cur_off[k] = c, c += sizes[k];
  c = rn;
  for (std::size_t k = 0; k < steps.size(); ++k) new_off[k] = c, c += sizes[k];
  for (std::size_t k = 0; k < steps.size(); ++k)
    for (std::size_t i = 0; i < sizes[k]; ++i) image[cur_off[k] + i] = new_off[k] + i;
  W = permutation_matrix_from_columns(image, n) * W;

  std::vector<GLattice> parts{build_I(out.after).lattice};
  for (auto& H : out.summands) parts.push_back(permutation_lattice(H));
  out.witness = IsoWitness{I0.lattice, direct_sum(parts), W, false};
  check_witness(out.witness, "chain");
  return out;
}

std::pair<std::size_t, std::size_t> member_copy_range(const WeightedMultiset& ms, const Subgroup& H) {
  std::size_t base = 0;
  for (const auto& m : ms.members()) {
    if (m.H == H) return {base, base + m.weights.size()};
    base += m.weights.size();
  }
  throw std::invalid_argument("member not present: " + H.describe());
}

// Smallest g with H inside g K g^-1, if any.
std::optional<int> conjugate_containment(const Subgroup& H, const Subgroup& K) {
  const auto& G = H.group();
  if (K.order() % H.order()) return std::nullopt;
  std::vector<int> gens = member_generators(H);
  for (int g = 0; g < G->order(); ++g) {
    int gi = G->inv(g);
    bool ok = true;
    for (int h : gens)
      if (!K.contains(G->conj(gi, h))) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  return std::nullopt;
}

}  // namespace

WeightedMultiset::WeightedMultiset(GroupPtr G, std::vector<Member> members) : G_(std::move(G)) {
  for (auto& m : members) {
    if (m.H.group() != G_) throw std::invalid_argument("WeightedMultiset: member from another group");
    for (long w : m.weights)
      if (w <= 0) throw std::invalid_argument("WeightedMultiset: weights must be positive");
    auto it = std::find_if(members_.begin(), members_.end(), [&](const Member& x) { return x.H == m.H; });
    if (it == members_.end())
      members_.push_back(m);
    else
      it->weights.insert(it->weights.end(), m.weights.begin(), m.weights.end());
  }
  members_.erase(std::remove_if(members_.begin(), members_.end(), [](const Member& m) { return m.weights.empty(); }),
                 members_.end());
  for (auto& m : members_) std::sort(m.weights.begin(), m.weights.end());
  std::sort(members_.begin(), members_.end(), [](const Member& a, const Member& b) { return a.H < b.H; });
}

WeightedMultiset WeightedMultiset::of(const std::vector<Subgroup>& subs) {
  if (subs.empty()) throw std::invalid_argument("WeightedMultiset::of: empty family");
  std::vector<Member> mem;
  for (auto& H : subs) mem.push_back(Member{H, {1}});
  return WeightedMultiset(subs[0].group(), mem);
}

std::size_t WeightedMultiset::size() const {
  std::size_t n = 0;
  for (auto& m : members_) n += m.weights.size();
  return n;
}

std::vector<Subgroup> WeightedMultiset::underlying_set() const {
  std::vector<Subgroup> out;
  for (auto& m : members_) out.push_back(m.H);
  return out;
}

std::vector<Subgroup> WeightedMultiset::expanded() const {
  std::vector<Subgroup> out;
  for (auto& m : members_)
    for (std::size_t i = 0; i < m.weights.size(); ++i) out.push_back(m.H);
  return out;
}

std::vector<long> WeightedMultiset::expanded_weights() const {
  std::vector<long> out;
  for (auto& m : members_) out.insert(out.end(), m.weights.begin(), m.weights.end());
  return out;
}

bool WeightedMultiset::is_unweighted() const {
  for (auto& m : members_)
    for (long w : m.weights)
      if (w != 1) return false;
  return true;
}

bool WeightedMultiset::is_normalized() const { return gcd_all(expanded_weights()) == 1; }

bool WeightedMultiset::contains(const Subgroup& H) const {
  return std::any_of(members_.begin(), members_.end(), [&](const Member& m) { return m.H == H; });
}

std::string WeightedMultiset::describe() const {
  std::string s = "{";
  bool first = true;
  for (auto& m : members_) {
    if (!first) s += ", ";
    first = false;
    s += m.H.describe();
    if (m.weights.size() > 1) s += " x" + std::to_string(m.weights.size());
    bool plain = std::all_of(m.weights.begin(), m.weights.end(), [](long w) { return w == 1; });
    if (!plain) s += " w" + weight_text(m.weights);
  }
  return s + "}";
}

nlohmann::json WeightedMultiset::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& m : members_) {
    nlohmann::json gens = nlohmann::json::array();
    for (int g : member_generators(m.H)) gens.push_back(G_->element_name(g));
    arr.push_back({{"generators", gens}, {"multiplicity", m.weights.size()}, {"weights", m.weights}, {"order", m.H.order()}});
  }
  return {{"members", arr}};
}

WeightedMultiset WeightedMultiset::from_json(const GroupPtr& G, const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_array() ? j : j.at("members");
  std::vector<Member> mem;
  for (auto& e : arr) {
    std::vector<int> gens;
    for (auto& g : e.at("generators")) {
      if (g.is_number_integer()) {
        int id = g.get<int>();
        if (id < 0 || id >= G->order()) throw std::invalid_argument("element id out of range");
        gens.push_back(id);
      } else {
        gens.push_back(G->parse_element(g.get<std::string>()));
      }
    }
    Subgroup H(G, gens);
    std::vector<long> w;
    if (e.contains("weights")) w = e.at("weights").get<std::vector<long>>();
    std::size_t mult = e.contains("multiplicity") ? e.at("multiplicity").get<std::size_t>() : (w.empty() ? 1 : w.size());
    if (mult == 0) throw std::invalid_argument("multiplicity must be at least 1");
    if (w.empty()) w.assign(mult, 1);
    if (w.size() != mult) throw std::invalid_argument("weights length differs from multiplicity");
    mem.push_back(Member{H, w});
  }
  if (mem.empty()) throw std::invalid_argument("multiset has no members");
  return WeightedMultiset(G, mem);
}

bool WeightedMultiset::operator==(const WeightedMultiset& o) const {
  if (members_.size() != o.members_.size()) return false;
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_[i].H != o.members_[i].H || members_[i].weights != o.members_[i].weights) return false;
  return true;
}

long d_of(const WeightedMultiset& ms) {
  if (ms.members().empty()) throw std::invalid_argument("d_of: empty multiset");
  long d = 0;
  for (auto& m : ms.members()) d = std::gcd(d, index_of(m.H));
  return d;
}

std::vector<long> prime_set(const WeightedMultiset& ms) { return prime_factors(d_of(ms)); }

long mu_of(const WeightedMultiset& ms) {
  long mu = 0;
  for (auto& m : ms.members()) mu = mu == 0 ? index_of(m.H) : std::min(mu, index_of(m.H));
  return mu;
}

long M_of(const WeightedMultiset& ms) {
  long M = 0;
  for (auto& m : ms.members()) M = std::max(M, index_of(m.H));
  return M;
}

WeightedMultiset normalize_weights(const WeightedMultiset& ms) {
  long d = gcd_all(ms.expanded_weights());
  if (d <= 1) return ms;
  std::vector<Member> mem = ms.members();
  for (auto& m : mem)
    for (long& w : m.weights) w /= d;
  return WeightedMultiset(ms.group(), mem);
}

GLatticeMap weighted_augmentation(const WeightedMultiset& ms) {
  Layout L = layout_of(ms);
  GLattice P = permutation_lattice(ms.expanded());
  IntMatrix e(1, L.total);
  for (std::size_t k = 0; k < L.subs.size(); ++k)
    for (std::size_t c = 0; c < L.cosets[k].size(); ++c) e(0, L.offset[k] + c) = L.weights[k];
  return GLatticeMap::trusted(P, trivial_lattice(ms.group()), e);
}

MultinormLattice build_I(const WeightedMultiset& ms) {
  if (ms.members().empty()) throw std::invalid_argument("build_I: empty multiset");
  MultinormLattice out;
  out.mset = ms;
  GLatticeMap eps = weighted_augmentation(ms);
  out.cover = eps.source();
  out.inclusion = kernel_basis(eps.matrix());
  if (out.inclusion.cols() == 0) {
    std::vector<IntMatrix> acts(ms.group()->generators().size(), IntMatrix(0, 0));
    out.lattice = GLattice::trusted(ms.group(), acts);
  } else {
    out.lattice = sublattice(out.cover, out.inclusion);
  }
  return out;
}

MultinormLattice build_J(const WeightedMultiset& ms) {
  MultinormLattice out = build_I(ms);
  out.dual_side = true;
  out.lattice = dual(out.lattice);
  return out;
}

JCokernel build_J_cokernel(const WeightedMultiset& ms) {
  WeightedMultiset nm = normalize_weights(ms);
  MultinormLattice I = build_I(nm);
  GLatticeMap eps = weighted_augmentation(nm);
  IntMatrix v = eps.matrix().transpose();  // Z -> cover, primitive
  SnfResult s = snf(v);
  IntMatrix U = s.U;
  if (s.D(0, 0) * s.V(0, 0) < 0) U.negate_row(0);  // U v = e_1
  IntMatrix Ui = inverse_unimodular(U);
  const std::size_t n = v.rows();
  std::vector<IntMatrix> acts;
  for (const IntMatrix& R : I.cover.generator_actions()) {
    IntMatrix C = U * R * Ui;
    acts.push_back(C.row_range(1, n).col_range(1, n));
  }
  JCokernel out;
  out.lattice = GLattice::trusted(ms.group(), acts);
  out.to_dual_I = (I.inclusion.transpose() * Ui).col_range(1, n);
  return out;
}

bool IsoWitness::verify() const {
  if (matrix.rows() != target.rank() || matrix.cols() != source.rank()) return false;
  if (source.rank() == 0) return true;
  if (!is_unimodular(matrix)) return false;
  return is_equivariant(source, target, matrix);
}

IsoWitness IsoWitness::dual() const {
  IntMatrix M = source.rank() == 0 ? matrix : inverse_unimodular(matrix).transpose();
  return IsoWitness{torus::dual(source), torus::dual(target), M, verified};
}

Reduction shear_remove(const WeightedMultiset& ms, std::size_t a, std::size_t b, int g) {
  const auto& G = ms.group();
  Layout L = layout_of(ms);
  if (a >= L.subs.size() || b >= L.subs.size() || a == b) throw std::invalid_argument("shear_remove: bad copy indices");
  const Subgroup& H0 = L.subs[a];
  const Subgroup& H1 = L.subs[b];
  if (!conjugate(H1, g).contains(H0)) throw std::invalid_argument("shear_remove: no containment");
  if (L.weights[a] % L.weights[b]) throw std::invalid_argument("shear_remove: weights not divisible");
  const long c = L.weights[a] / L.weights[b];

  // Remove copy a.
  std::vector<Member> mem;
  {
    std::size_t k = 0;
    for (const auto& m : ms.members()) {
      Member nm{m.H, {}};
      for (long w : m.weights) {
        if (k != a) nm.weights.push_back(w);
        ++k;
      }
      mem.push_back(nm);
    }
  }
  WeightedMultiset after(G, mem);

  MultinormLattice I = build_I(ms);
  MultinormLattice Ip = build_I(after);
  const IntMatrix& K = I.inclusion;
  // Inverse shear on the cover: the b block gains c * pi(x) where pi(xH0) = x g H1.
  IntMatrix Phi = IntMatrix::identity(L.total);
  for (std::size_t x = 0; x < L.cosets[a].size(); ++x) {
    int rep = L.cosets[a].reps[x];
    std::size_t y = L.cosets[b].coset_of[G->mul(rep, g)];
    Phi(L.offset[b] + y, L.offset[a] + x) += c;
  }
  IntMatrix PK = Phi * K;
  std::vector<std::size_t> keep_rows, a_rows;
  for (std::size_t k = 0; k < L.subs.size(); ++k)
    for (std::size_t i = 0; i < L.cosets[k].size(); ++i) (k == a ? a_rows : keep_rows).push_back(L.offset[k] + i);
  IntMatrix top = Ip.inclusion.cols() ? left_inverse(Ip.inclusion) * PK.select_rows(keep_rows) : IntMatrix(0, K.cols());
  IntMatrix W = IntMatrix::vstack(top, PK.select_rows(a_rows));

  Reduction out;
  out.before = ms;
  out.after = after;
  out.summands = {H0};
  std::ostringstream os;
  os << "split off Z[G/" << H0.describe() << "] (weight " << L.weights[a] << ") using " << H1.describe()
     << " (weight " << L.weights[b] << ")";
  if (g != 0) os << " conjugated by " << G->element_name(g);
  out.steps.push_back(os.str());
  out.witness = IsoWitness{I.lattice, direct_sum({Ip.lattice, permutation_lattice(H0)}), W, false};
  check_witness(out.witness, "shear_remove");
  return out;
}

std::optional<Reduction> dominated_step(const WeightedMultiset& ms) {
  std::vector<Subgroup> subs = ms.expanded();
  std::vector<long> w = ms.expanded_weights();
  for (std::size_t a = 0; a < subs.size(); ++a)
    for (std::size_t b = 0; b < subs.size(); ++b) {
      if (a == b || !subs[b].contains(subs[a]) || w[a] % w[b]) continue;
      return shear_remove(ms, a, b, 0);
    }
  return std::nullopt;
}

Reduction dominated_step_or_throw(const WeightedMultiset& ms) {
  auto r = dominated_step(ms);
  if (!r) throw NoDominatedPair("no dominated pair in " + ms.describe());
  return *r;
}

Reduction remove_dominated(const WeightedMultiset& ms) {
  std::vector<Reduction> steps;
  WeightedMultiset cur = ms;
  while (auto r = dominated_step(cur)) {
    cur = r->after;
    steps.push_back(std::move(*r));
  }
  return chain(ms, steps);
}

WeightedMultiset reduce_red(const WeightedMultiset& ms) {
  std::vector<Subgroup> set = ms.underlying_set(), keep;
  for (auto& H : set) {
    bool maximal = std::none_of(set.begin(), set.end(), [&](const Subgroup& K) { return K != H && K.contains(H); });
    if (maximal) keep.push_back(H);
  }
  return WeightedMultiset::of(keep);
}

bool is_reduced(const std::vector<Subgroup>& set) {
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < set.size(); ++j)
      if (i != j && set[j].contains(set[i])) return false;
  return true;
}

bool is_strongly_reduced(const std::vector<Subgroup>& set) {
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < set.size(); ++j)
      if (i != j && (set[i] == set[j] || conjugate_containment(set[i], set[j]))) return false;
  return true;
}

namespace {
std::vector<Subgroup> srd_order(const WeightedMultiset& ms) {
  std::vector<Subgroup> order = ms.underlying_set();
  std::stable_sort(order.begin(), order.end(), [](const Subgroup& x, const Subgroup& y) {
    if (x.order() != y.order()) return x.order() > y.order();
    return x < y;
  });
  return order;
}
}  // namespace

std::vector<Subgroup> srd_members(const WeightedMultiset& ms) {
  std::vector<Subgroup> kept;
  for (const auto& H : srd_order(ms))
    if (std::none_of(kept.begin(), kept.end(),
                     [&](const Subgroup& K) { return conjugate_containment(H, K).has_value(); }))
      kept.push_back(H);
  std::sort(kept.begin(), kept.end());
  return kept;
}

Reduction reduce_srd(const WeightedMultiset& ms) {
  if (!ms.is_unweighted()) throw std::invalid_argument("reduce_srd: weighted input; apply remove_dominated first");
  std::vector<Subgroup> order = srd_order(ms);
  std::vector<Subgroup> kept;
  std::vector<Reduction> steps;
  WeightedMultiset cur = ms;
  for (const auto& H : order) {
    std::optional<std::pair<Subgroup, int>> partner;
    for (auto& K : kept)
      if (auto g = conjugate_containment(H, K)) {
        partner = std::make_pair(K, *g);
        break;
      }
    if (!partner) {
      kept.push_back(H);
      while (true) {
        auto [lo, hi] = member_copy_range(cur, H);
        if (hi - lo < 2) break;
        steps.push_back(shear_remove(cur, lo + 1, lo, 0));
        cur = steps.back().after;
      }
    } else {
      while (cur.contains(H)) {
        auto [lo, hi] = member_copy_range(cur, H);
        auto [plo, phi] = member_copy_range(cur, partner->first);
        (void)hi, (void)phi;
        steps.push_back(shear_remove(cur, lo, plo, partner->second));
        cur = steps.back().after;
      }
    }
  }
  return chain(ms, steps);
}

Reduction conjugate_normal_form(const WeightedMultiset& ms) {
  const auto& G = ms.group();
  Layout L = layout_of(ms);
  std::vector<std::pair<Subgroup, long>> copies;
  std::vector<int> conj_by;
  std::vector<std::string> notes;
  for (std::size_t k = 0; k < L.subs.size(); ++k) {
    Subgroup Hm = conjugacy_class_min(L.subs[k]);
    int g = 0;
    if (Hm != L.subs[k]) {
      for (g = 0; g < G->order(); ++g)
        if (conjugate(L.subs[k], g) == Hm) break;
      notes.push_back(L.subs[k].describe() + " -> " + Hm.describe() + " by " + G->element_name(g));
    }
    copies.emplace_back(Hm, L.weights[k]);
    conj_by.push_back(g);
  }
  Placed pl = place_copies(G, copies);
  Layout Ln = layout_of(pl.ms);
  // xH -> x g^-1 (g H g^-1)
  std::vector<std::size_t> image(L.total);
  for (std::size_t k = 0; k < L.subs.size(); ++k) {
    std::size_t t = pl.pos[k];
    int gi = G->inv(conj_by[k]);
    for (std::size_t x = 0; x < L.cosets[k].size(); ++x)
      image[L.offset[k] + x] = Ln.offset[t] + Ln.cosets[t].coset_of[G->mul(L.cosets[k].reps[x], gi)];
  }
  IntMatrix Pi = permutation_matrix_from_columns(image, L.total);
  MultinormLattice I = build_I(ms), In = build_I(pl.ms);
  Reduction out;
  out.before = ms;
  out.after = pl.ms;
  out.steps = notes;
  IntMatrix W = In.inclusion.cols() ? left_inverse(In.inclusion) * Pi * I.inclusion : IntMatrix(0, 0);
  out.witness = IsoWitness{I.lattice, In.lattice, W, false};
  check_witness(out.witness, "conjugate_normal_form");
  return out;
}

RestrictedMultiset restrict_multiset(const WeightedMultiset& ms, const Subgroup& P) {
  const auto& G = ms.group();
  if (P.group() != G) throw std::invalid_argument("restrict_multiset: subgroup of another group");
  RestrictedMultiset out;
  out.sub = as_group(P);
  const GroupPtr& Pg = out.sub.group;
  Layout L = layout_of(ms);

  struct Piece {
    std::size_t copy;
    int g;
    Subgroup local;
  };
  std::vector<Piece> pieces;
  std::vector<std::pair<Subgroup, long>> copies;
  for (std::size_t k = 0; k < L.subs.size(); ++k)
    for (int g : double_cosets(P, L.subs[k])) {
      Subgroup inter = intersection(P, conjugate(L.subs[k], g));
      std::vector<int> loc;
      for (int x : inter.elements()) loc.push_back(out.sub.from_parent[x]);
      Subgroup local(Pg, loc);
      pieces.push_back(Piece{k, g, local});
      copies.emplace_back(local, L.weights[k]);
    }
  Placed pl = place_copies(Pg, copies);
  out.mset = pl.ms;
  for (auto& m : out.mset.members()) {
    std::vector<int> par;
    for (int x : m.H.elements()) par.push_back(out.sub.to_parent[x]);
    out.in_parent.emplace_back(G, par);
  }
  Layout Ln = layout_of(pl.ms);
  // Old basis vector p g H_k  <->  new basis vector p (P cap g H_k g^-1).
  IntMatrix Pi(Ln.total, L.total);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& pc = pieces[i];
    std::size_t t = pl.pos[i];
    for (int p = 0; p < Pg->order(); ++p) {
      std::size_t row = Ln.offset[t] + Ln.cosets[t].coset_of[p];
      int x = G->mul(out.sub.to_parent[p], pc.g);
      std::size_t col = L.offset[pc.copy] + L.cosets[pc.copy].coset_of[x];
      Pi(row, col) = 1;
    }
  }
  MultinormLattice I = build_I(ms), In = build_I(pl.ms);
  GLattice src = restrict(I.lattice, P).lattice;
  src = GLattice::trusted(Pg, src.generator_actions(), src.labels());
  IntMatrix W = In.inclusion.cols() ? left_inverse(In.inclusion) * Pi * I.inclusion : IntMatrix(0, 0);
  out.witness = IsoWitness{src, In.lattice, W, false};
  check_witness(out.witness, "restrict_multiset");
  return out;
}

WeightedMultiset restricted_members(const WeightedMultiset& ms, const SubgroupAsGroup& sub) {
  Subgroup P(ms.group(), [&] {
    std::vector<int> v(sub.to_parent.begin(), sub.to_parent.end());
    return v;
  }());
  std::vector<Member> mem;
  for (const auto& m : ms.members())
    for (int g : double_cosets(P, m.H)) {
      Subgroup inter = intersection(P, conjugate(m.H, g));
      std::vector<int> loc;
      for (int x : inter.elements()) loc.push_back(sub.from_parent[x]);
      mem.push_back(Member{Subgroup(sub.group, loc), m.weights});
    }
  return WeightedMultiset(sub.group, mem);
}

QuotientMultiset quotient_multiset(const WeightedMultiset& ms, const Subgroup& N) {
  const auto& G = ms.group();
  QuotientMultiset out;
  out.quotient = quotient_group(N);  // throws NotNormal
  const Quotient& q = out.quotient;
  Layout L = layout_of(ms);
  std::vector<std::pair<Subgroup, long>> copies;
  for (std::size_t k = 0; k < L.subs.size(); ++k) {
    Subgroup img = q.image(L.subs[k]);
    long lift = static_cast<long>(join(L.subs[k], N).order() / L.subs[k].order());
    copies.emplace_back(img, lift * L.weights[k]);
  }
  Placed pl = place_copies(q.Q, copies);
  out.mset = normalize_weights(pl.ms);
  Layout Ln = layout_of(out.mset);
  // Orbit sums: column per new coset, summing the old cosets over it.
  IntMatrix O(L.total, Ln.total);
  for (std::size_t k = 0; k < L.subs.size(); ++k) {
    std::size_t t = pl.pos[k];
    for (std::size_t x = 0; x < L.cosets[k].size(); ++x) {
      int rep = L.cosets[k].reps[x];
      O(L.offset[k] + x, Ln.offset[t] + Ln.cosets[t].coset_of[q.proj[rep]]) = 1;
    }
  }
  MultinormLattice I = build_I(ms), In = build_I(out.mset);
  FixedLattice F = fixed_lattice(I.lattice, N);
  GLattice src = GLattice::trusted(q.Q, F.lattice.generator_actions());
  IntMatrix W(0, 0);
  if (In.inclusion.cols() && F.inclusion.cols())
    W = left_inverse(In.inclusion) * left_inverse(O) * I.inclusion * F.inclusion;
  else
    W = IntMatrix(In.lattice.rank(), src.rank());
  out.witness = IsoWitness{src, In.lattice, W, false};
  check_witness(out.witness, "quotient_multiset");
  (void)G;
  return out;
}

bool is_special(const std::vector<Subgroup>& set) {
  for (auto& H : set)
    if (H.order() == H.group()->order()) throw ContainsG("is_special: the whole group is a member");
  if (set.size() < 2) return false;
  std::vector<Subgroup> cores;
  for (auto& H : set) cores.push_back(normal_core(H));
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      if (set[i] == set[j]) return false;
      if (!product_is_whole(cores[i], set[j]) && !product_is_whole(cores[j], set[i])) return false;
    }
  return true;
}

std::optional<std::vector<Subgroup>> find_special_subset(const std::vector<Subgroup>& set, std::size_t size) {
  for (auto& H : set)
    if (H.order() == H.group()->order()) throw ContainsG("find_special_subset: the whole group is a member");
  if (size < 2 || size > set.size()) return std::nullopt;
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::vector<Subgroup> pick;
    for (auto i : idx) pick.push_back(set[i]);
    if (is_special(pick)) return pick;
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == set.size() - size + i - 1) --i;
    if (i == 0) return std::nullopt;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<Subgroup> lift_special_to_red(const WeightedMultiset& ms, const std::vector<Subgroup>& special) {
  std::vector<Subgroup> out;
  for (auto& K : reduce_red(ms).underlying_set())
    if (std::any_of(special.begin(), special.end(), [&](const Subgroup& H) { return K.contains(H); })) out.push_back(K);
  return out;
}

std::vector<Subgroup> sylow_special_transfer(const std::vector<Subgroup>& special, const Subgroup& P, long p) {
  std::vector<Subgroup> out;
  if (special.empty()) return out;
  const auto& G = P.group();
  auto ordp = [p](long n) {
    long e = 0;
    while (n % p == 0) n /= p, ++e;
    return e;
  };
  for (auto& H : special) {
    long target = ordp(index_of(H));
    for (int g = 0; g < G->order(); ++g) {
      Subgroup X = intersection(P, conjugate(H, g));
      if (ordp(P.order() / X.order()) != target) continue;
      out.push_back(X);  // one conjugate per member: two from the same member need not pair up
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace torus
