#include "nlsnf/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "nlsnf/errors.hpp"

namespace nlsnf {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kCancellationUlps = 16.0;

bool balanced_and_bounded(const ClassKey& k, int half, int radius) {
  long long s = 0;
  for (int i = 0; i < half; ++i) {
    const int a = k.idx[static_cast<std::size_t>(i)];
    const int b = k.idx[static_cast<std::size_t>(half + i)];
    if (std::abs(a) > radius || std::abs(b) > radius) return false;
    s += a - b;
  }
  return s == 0;
}

std::vector<Term> sorted_terms(std::unordered_map<ClassKey, cplx, ClassKeyHash>&& acc) {
  std::vector<Term> terms;
  terms.reserve(acc.size());
  for (auto& [k, c] : acc)
    if (c != cplx{}) terms.push_back({k, c});
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.key < b.key; });
  return terms;
}

// Drops |c| <= rel * max|c|; returns the dropped l1 mass.
double prune_in_place(std::vector<Term>& terms, double rel) {
  double mx = 0.0;
  for (const auto& t : terms) mx = std::max(mx, std::abs(t.coef));
  const double thr = rel * mx;
  double dropped = 0.0;
  std::erase_if(terms, [&](const Term& t) {
    const double a = std::abs(t.coef);
    if (a <= thr) {
      dropped += a;
      return true;
    }
    return false;
  });
  return dropped;
}

}  // namespace

int default_threads() {
  if (const char* env = std::getenv("NLSNF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// ---------------------------------------------------------------------------

HomogeneousHamiltonian::HomogeneousHamiltonian(int degree, int radius) : degree_(degree), radius_(radius) {
  if (degree < 2 || degree % 2 != 0 || degree > kMaxDegree)
    throw std::invalid_argument("HomogeneousHamiltonian: degree must be even, in [2, " + std::to_string(kMaxDegree) +
                                "]");
  if (radius < 0) throw std::invalid_argument("HomogeneousHamiltonian: negative radius");
}

HomogeneousHamiltonian HomogeneousHamiltonian::from_terms(int degree, int radius, std::vector<Term> terms) {
  HomogeneousHamiltonian h(degree, radius);
  for (const auto& t : terms)
    if (!balanced_and_bounded(t.key, h.half(), radius))
      throw std::invalid_argument("HomogeneousHamiltonian: class violates momentum constraint or radius");
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.key < b.key; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().key == t.key)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == cplx{}; });
  h.terms_ = std::move(merged);
  return h;
}

cplx HomogeneousHamiltonian::coefficient(const ClassKey& key) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), key, [](const Term& t, const ClassKey& k) { return t.key < k; });
  return (it != terms_.end() && it->key == key) ? it->coef : cplx{};
}

HomogeneousHamiltonian HomogeneousHamiltonian::conj() const {
  std::vector<Term> t;
  t.reserve(terms_.size());
  for (const auto& e : terms_) t.push_back({conjugate_key(e.key, half()), std::conj(e.coef)});
  return from_terms(degree_, radius_, std::move(t));
}

HomogeneousHamiltonian HomogeneousHamiltonian::scaled(cplx a) const {
  HomogeneousHamiltonian h(degree_, radius_);
  if (a == cplx{}) return h;
  h.terms_ = terms_;
  for (auto& t : h.terms_) t.coef *= a;
  return h;
}

HomogeneousHamiltonian HomogeneousHamiltonian::with_radius(int radius) const {
  if (radius >= radius_) {
    HomogeneousHamiltonian h = *this;
    h.radius_ = radius;
    return h;
  }
  std::vector<Term> t;
  for (const auto& e : terms_)
    if (balanced_and_bounded(e.key, half(), radius)) t.push_back(e);
  return from_terms(degree_, radius, std::move(t));
}

double HomogeneousHamiltonian::max_abs() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.coef));
  return m;
}

double HomogeneousHamiltonian::l1_mass() const {
  double m = 0.0;
  for (const auto& t : terms_) m += std::abs(t.coef);
  return m;
}

bool HomogeneousHamiltonian::is_reality_symmetric(double rel_tol) const {
  const double scale = std::max(max_abs(), 1e-300);
  for (const auto& t : terms_) {
    const cplx partner = coefficient(conjugate_key(t.key, half()));
    if (std::abs(partner - std::conj(t.coef)) > rel_tol * scale) return false;
  }
  return true;
}

nlohmann::json HomogeneousHamiltonian::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& t : terms_) {
    std::vector<int> odd(t.key.odd(half()).begin(), t.key.odd(half()).end());
    std::vector<int> even(t.key.even(half()).begin(), t.key.even(half()).end());
    entries.push_back({{"odd", odd}, {"even", even}, {"re", t.coef.real()}, {"im", t.coef.imag()}});
  }
  return {{"degree", degree_}, {"M", radius_}, {"entries", std::move(entries)}};
}

HomogeneousHamiltonian HomogeneousHamiltonian::from_json(const nlohmann::json& j) {
  const int degree = j.at("degree").get<int>();
  const int radius = j.at("M").get<int>();
  std::vector<Term> terms;
  for (const auto& e : j.at("entries")) {
    const auto odd = e.at("odd").get<std::vector<int>>();
    const auto even = e.at("even").get<std::vector<int>>();
    if (static_cast<int>(odd.size() + even.size()) != degree)
      throw std::invalid_argument("tensor entry length does not match degree");
    terms.push_back({make_key(odd, even), {e.at("re").get<double>(), e.at("im").get<double>()}});
  }
  return from_terms(degree, radius, std::move(terms));
}

namespace {
// Sorted merge; a sum at the rounding floor of its two inputs is dropped as an exact cancellation.
HomogeneousHamiltonian combine(const HomogeneousHamiltonian& a, const HomogeneousHamiltonian& b, double sign) {
  if (a.degree() != b.degree()) throw std::invalid_argument("cannot add tensors of different degree");
  const auto ta = a.terms(), tb = b.terms();
  std::vector<Term> t;
  t.reserve(ta.size() + tb.size());
  std::size_t i = 0, j = 0;
  while (i < ta.size() || j < tb.size()) {
    if (j == tb.size() || (i < ta.size() && ta[i].key < tb[j].key)) {
      t.push_back(ta[i++]);
    } else if (i == ta.size() || tb[j].key < ta[i].key) {
      t.push_back({tb[j].key, sign * tb[j].coef});
      ++j;
    } else {
      const cplx v = ta[i].coef + sign * tb[j].coef;
      const double floor = kCancellationUlps * std::numeric_limits<double>::epsilon() *
                           (std::abs(ta[i].coef) + std::abs(tb[j].coef));
      if (std::abs(v) > floor) t.push_back({ta[i].key, v});
      ++i;
      ++j;
    }
  }
  return HomogeneousHamiltonian::from_terms(a.degree(), std::max(a.radius(), b.radius()), std::move(t));
}
}  // namespace

HomogeneousHamiltonian operator+(const HomogeneousHamiltonian& a, const HomogeneousHamiltonian& b) {
  return combine(a, b, 1.0);
}
HomogeneousHamiltonian operator-(const HomogeneousHamiltonian& a, const HomogeneousHamiltonian& b) {
  return combine(a, b, -1.0);
}

// ---------------------------------------------------------------------------

TensorBuilder::TensorBuilder(int degree, int radius) : degree_(degree), radius_(radius) {
  if (degree < 2 || degree % 2 != 0 || degree > kMaxDegree) throw std::invalid_argument("TensorBuilder: bad degree");
}

void TensorBuilder::add(const ClassKey& key, cplx c) { acc_[key] += c; }

void TensorBuilder::add_tuple(std::span<const int> tuple, cplx c) {
  if (static_cast<int>(tuple.size()) != degree_) throw std::invalid_argument("TensorBuilder: tuple length mismatch");
  add(key_from_tuple(tuple), c);
}

HomogeneousHamiltonian TensorBuilder::build() && {
  return HomogeneousHamiltonian::from_terms(degree_, radius_, sorted_terms(std::move(acc_)));
}

// ---------------------------------------------------------------------------

QuadraticPart make_quadratic(int radius) {
  QuadraticPart q{radius, std::vector<double>(static_cast<std::size_t>(2 * radius + 1))};
  for (int n = -radius; n <= radius; ++n) q.weights[static_cast<std::size_t>(n + radius)] = double(n) * n;
  return q;
}

QuadraticPart make_quadratic(int radius, std::vector<double> weights) {
  if (weights.size() != static_cast<std::size_t>(2 * radius + 1))
    throw std::invalid_argument("make_quadratic: expected 2M+1 weights");
  for (double w : weights)
    if (!std::isfinite(w)) throw std::invalid_argument("make_quadratic: non-finite weight");
  return QuadraticPart{radius, std::move(weights)};
}

QuadraticPart make_shifted_quadratic(int radius, double mu) {
  auto q = make_quadratic(radius);
  for (auto& w : q.weights) w += 2.0 * mu;
  return q;
}

std::string to_string(PieceTag tag) {
  switch (tag) {
    case PieceTag::Resonant: return "resonant";
    case PieceTag::Nonresonant: return "nonresonant";
    case PieceTag::Remainder: return "remainder";
  }
  return "unknown";
}

PieceTag piece_tag_from_string(const std::string& s) {
  if (s == "resonant") return PieceTag::Resonant;
  if (s == "nonresonant") return PieceTag::Nonresonant;
  if (s == "remainder") return PieceTag::Remainder;
  throw std::invalid_argument("unknown piece tag '" + s + "'");
}

HomogeneousHamiltonian make_mass_tensor(int radius) {
  std::vector<Term> t;
  for (int n = -radius; n <= radius; ++n) {
    const int a[1] = {n};
    t.push_back({make_key(a, a), 1.0});
  }
  return HomogeneousHamiltonian::from_terms(2, radius, std::move(t));
}

namespace {
void enumerate_multisets(int size, int lo, int hi, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == size) {
    out.push_back(cur);
    return;
  }
  const int start = cur.empty() ? lo : cur.back();
  for (int v = start; v <= hi; ++v) {
    cur.push_back(v);
    enumerate_multisets(size, lo, hi, cur, out);
    cur.pop_back();
  }
}

double multiset_orderings(const std::vector<int>& m) {
  std::vector<std::int16_t> s(m.begin(), m.end());
  return orderings(s);
}
}  // namespace

HomogeneousHamiltonian make_nls_nonlinearity(int p, int radius) {
  if (p < 1) throw std::invalid_argument("make_nls_nonlinearity: p must be >= 1");
  if (radius < 1) throw std::invalid_argument("make_nls_nonlinearity: M must be >= 1");
  const int half = p + 1;
  if (2 * half > kMaxDegree) throw std::length_error("make_nls_nonlinearity: degree exceeds kMaxDegree");
  std::vector<std::vector<int>> sets;
  std::vector<int> cur;
  enumerate_multisets(half, -radius, radius, cur, sets);
  // bucket by sum
  const int span = 2 * half * radius + 1;
  std::vector<std::vector<std::size_t>> by_sum(static_cast<std::size_t>(span));
  std::vector<double> ord(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    int s = 0;
    for (int v : sets[i]) s += v;
    by_sum[static_cast<std::size_t>(s + half * radius)].push_back(i);
    ord[i] = multiset_orderings(sets[i]);
  }
  std::vector<Term> terms;
  for (const auto& bucket : by_sum)
    for (std::size_t ia : bucket)
      for (std::size_t ib : bucket) terms.push_back({make_key(sets[ia], sets[ib]), ord[ia] * ord[ib]});
  return HomogeneousHamiltonian::from_terms(2 * half, radius, std::move(terms));
}

// ---------------------------------------------------------------------------

namespace {

struct FieldTable {
  int R;
  std::vector<cplx> v, vc;
  FieldTable(const FourierField& q, int R_) : R(R_), v(static_cast<std::size_t>(2 * R_ + 1)), vc(v.size()) {
    for (int n = -R; n <= R; ++n) {
      v[static_cast<std::size_t>(n + R)] = q[n];
      vc[static_cast<std::size_t>(n + R)] = std::conj(q[n]);
    }
  }
  cplx at(int n) const { return v[static_cast<std::size_t>(n + R)]; }
  cplx atc(int n) const { return vc[static_cast<std::size_t>(n + R)]; }
};

}  // namespace

cplx evaluate_complex(const HomogeneousHamiltonian& h, const FourierField& q) {
  const FieldTable f(q, std::max(h.radius(), q.radius()));
  const int r = h.half();
  cplx acc{};
  for (const auto& t : h.terms()) {
    cplx m = t.coef;
    for (int i = 0; i < r; ++i) m *= f.at(t.key.idx[static_cast<std::size_t>(i)]);
    for (int i = 0; i < r; ++i) m *= f.atc(t.key.idx[static_cast<std::size_t>(r + i)]);
    acc += m;
  }
  return acc;
}

double evaluate(const HomogeneousHamiltonian& h, const FourierField& q) {
  const FieldTable f(q, std::max(h.radius(), q.radius()));
  const int r = h.half();
  cplx acc{};
  double magnitude = 0.0;
  for (const auto& t : h.terms()) {
    cplx m = t.coef;
    for (int i = 0; i < r; ++i) m *= f.at(t.key.idx[static_cast<std::size_t>(i)]);
    for (int i = 0; i < r; ++i) m *= f.atc(t.key.idx[static_cast<std::size_t>(r + i)]);
    acc += m;
    magnitude += std::abs(m);
  }
  if (std::abs(acc.imag()) > 1e-10 * magnitude + 1e-14)
    throw RealityViolation("evaluate: imaginary residual " + std::to_string(acc.imag()) + " against magnitude " +
                           std::to_string(magnitude));
  return acc.real();
}

double evaluate(const QuadraticPart& h, const FourierField& q) {
  double acc = 0.0;
  for (int n = -h.radius; n <= h.radius; ++n) acc += h(n) * std::norm(q[n]);
  return acc;
}

double evaluate(const HamiltonianSum& h, const FourierField& q) {
  double acc = evaluate(h.quadratic, q);
  for (const auto& p : h.pieces) acc += evaluate(p.tensor, q);
  return acc;
}

namespace {

// d/d(slot value) of each class monomial, accumulated into out[n].
// conj_side == true differentiates with respect to conj(q_n) (even multiset).
FourierField gradient_impl(const HomogeneousHamiltonian& h, const FourierField& q, bool conj_side) {
  const int R = std::max(h.radius(), q.radius());
  const FieldTable f(q, R);
  const int r = h.half();
  std::vector<cplx> out(static_cast<std::size_t>(2 * h.radius() + 1));
  std::array<cplx, kMaxDegree> vals{};
  for (const auto& t : h.terms()) {
    const std::int16_t* diff = t.key.idx.data() + (conj_side ? r : 0);
    const std::int16_t* other = t.key.idx.data() + (conj_side ? 0 : r);
    cplx other_prod = t.coef;
    for (int i = 0; i < r; ++i) other_prod *= conj_side ? f.at(other[i]) : f.atc(other[i]);
    for (int i = 0; i < r; ++i) vals[static_cast<std::size_t>(i)] = conj_side ? f.atc(diff[i]) : f.at(diff[i]);
    int i = 0;
    while (i < r) {
      int j = i;
      while (j < r && diff[j] == diff[i]) ++j;
      cplx rest = other_prod * double(j - i);
      for (int k = 0; k < r; ++k)
        if (k != i) rest *= vals[static_cast<std::size_t>(k)];
      out[static_cast<std::size_t>(diff[i] + h.radius())] += rest;
      i = j;
    }
  }
  return FourierField(h.radius(), std::move(out));
}

FourierField quadratic_gradient(const QuadraticPart& h, const FourierField& q, bool conj_side) {
  std::vector<cplx> out(static_cast<std::size_t>(2 * h.radius + 1));
  for (int n = -h.radius; n <= h.radius; ++n)
    out[static_cast<std::size_t>(n + h.radius)] = h(n) * (conj_side ? q[n] : std::conj(q[n]));
  return FourierField(h.radius, std::move(out));
}

}  // namespace

FourierField gradient_bar(const HomogeneousHamiltonian& h, const FourierField& q) { return gradient_impl(h, q, true); }
FourierField gradient_unbar(const HomogeneousHamiltonian& h, const FourierField& q) {
  return gradient_impl(h, q, false);
}
FourierField gradient_bar(const QuadraticPart& h, const FourierField& q) { return quadratic_gradient(h, q, true); }
FourierField gradient_unbar(const QuadraticPart& h, const FourierField& q) { return quadratic_gradient(h, q, false); }

FourierField gradient_bar(const HamiltonianSum& h, const FourierField& q) {
  FourierField g = gradient_bar(h.quadratic, q);
  for (const auto& p : h.pieces) g = g + gradient_bar(p.tensor, q);
  return g;
}

FourierField gradient_unbar(const HamiltonianSum& h, const FourierField& q) {
  FourierField g = gradient_unbar(h.quadratic, q);
  for (const auto& p : h.pieces) g = g + gradient_unbar(p.tensor, q);
  return g;
}

// ---------------------------------------------------------------------------

namespace {

struct SlotEntry {
  std::uint32_t term;
  std::int32_t mult;
};

// For each frequency, the classes of h that contain it on the odd (resp. even) side.
struct SlotIndex {
  int R;
  std::vector<std::vector<SlotEntry>> odd, even;

  SlotIndex(const HomogeneousHamiltonian& h, int R_)
      : R(R_), odd(static_cast<std::size_t>(2 * R_ + 1)), even(static_cast<std::size_t>(2 * R_ + 1)) {
    const int r = h.half();
    const auto terms = h.terms();
    for (std::uint32_t ti = 0; ti < terms.size(); ++ti) {
      const auto& k = terms[ti].key;
      for (int side = 0; side < 2; ++side) {
        const std::int16_t* v = k.idx.data() + side * r;
        int i = 0;
        while (i < r) {
          int j = i;
          while (j < r && v[j] == v[i]) ++j;
          (side == 0 ? odd : even)[static_cast<std::size_t>(v[i] + R)].push_back({ti, j - i});
          i = j;
        }
      }
    }
  }
};

// out = sorted merge of (a without one copy of skip_a) and (b without one copy of skip_b).
// A skip value outside the int16 range removes nothing.
inline void merge_skip(const std::int16_t* a, int na, int skip_a, const std::int16_t* b, int nb, int skip_b,
                       std::int16_t* out) {
  std::array<std::int16_t, kMaxDegree> ta{}, tb{};
  int la = 0, lb = 0;
  bool done = false;
  for (int i = 0; i < na; ++i) {
    if (!done && a[i] == skip_a) {
      done = true;
      continue;
    }
    ta[static_cast<std::size_t>(la++)] = a[i];
  }
  done = false;
  for (int i = 0; i < nb; ++i) {
    if (!done && b[i] == skip_b) {
      done = true;
      continue;
    }
    tb[static_cast<std::size_t>(lb++)] = b[i];
  }
  std::merge(ta.begin(), ta.begin() + la, tb.begin(), tb.begin() + lb, out);
}

constexpr int kNoSkip = 1 << 20;

// Running value plus the sum of |contribution|, used to recognise cancellation noise.
struct Slot {
  cplx v;
  double a = 0.0;
};
using Accumulator = std::unordered_map<ClassKey, Slot, ClassKeyHash>;

void bracket_chunk(const HomogeneousHamiltonian& h1, const HomogeneousHamiltonian& h2, const SlotIndex& idx2,
                   std::size_t begin, std::size_t end, Accumulator& acc) {
  const int r1 = h1.half(), r2 = h2.half();
  const int ro = r1 + r2 - 1;  // half of the result
  const auto t1 = h1.terms();
  const auto t2 = h2.terms();
  for (std::size_t a = begin; a < end; ++a) {
    const ClassKey& k1 = t1[a].key;
    const cplx c1 = t1[a].coef;
    const std::int16_t* A1 = k1.idx.data();
    const std::int16_t* B1 = k1.idx.data() + r1;
    // i * dH1/dq_n * dH2/dconj(q_n): n in A1 and n in B2
    for (int side = 0; side < 2; ++side) {
      const std::int16_t* S = side == 0 ? A1 : B1;
      int i = 0;
      while (i < r1) {
        int j = i;
        while (j < r1 && S[j] == S[i]) ++j;
        const int n = S[i];
        const int m1 = j - i;
        i = j;
        if (n < -idx2.R || n > idx2.R) continue;
        const auto& partners = (side == 0 ? idx2.even : idx2.odd)[static_cast<std::size_t>(n + idx2.R)];
        const cplx base = (side == 0 ? kI : -kI) * c1 * double(m1);
        for (const auto& pe : partners) {
          const ClassKey& k2 = t2[pe.term].key;
          const std::int16_t* A2 = k2.idx.data();
          const std::int16_t* B2 = k2.idx.data() + r2;
          ClassKey out;
          if (side == 0) {
            merge_skip(A1, r1, n, A2, r2, kNoSkip, out.idx.data());
            merge_skip(B1, r1, kNoSkip, B2, r2, n, out.idx.data() + ro);
          } else {
            merge_skip(A1, r1, kNoSkip, A2, r2, n, out.idx.data());
            merge_skip(B1, r1, n, B2, r2, kNoSkip, out.idx.data() + ro);
          }
          const cplx c = base * t2[pe.term].coef * double(pe.mult);
          auto& slot = acc[out];
          slot.v += c;
          slot.a += std::abs(c);
        }
      }
    }
  }
}

}  // namespace

BracketResult poisson_bracket(const HomogeneousHamiltonian& h1, const HomogeneousHamiltonian& h2,
                              const BracketOptions& opt) {
  const int degree = h1.degree() + h2.degree() - 2;
  if (degree > kMaxDegree)
    throw std::length_error("poisson_bracket: result degree " + std::to_string(degree) + " exceeds kMaxDegree");
  const int R = std::max(h1.radius(), h2.radius());
  const SlotIndex idx2(h2, R);

  const int threads = std::max(1, opt.threads > 0 ? opt.threads : default_threads());
  const std::size_t n1 = h1.size();
  const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(n1, 1));
  std::vector<Accumulator> accs(chunks);
  if (chunks == 1) {
    bracket_chunk(h1, h2, idx2, 0, n1, accs[0]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t b = n1 * c / chunks, e = n1 * (c + 1) / chunks;
      pool.emplace_back([&, b, e, c] { bracket_chunk(h1, h2, idx2, b, e, accs[c]); });
    }
    for (auto& t : pool) t.join();
    for (std::size_t c = 1; c < chunks; ++c)
      for (const auto& [k, v] : accs[c]) {
        auto& slot = accs[0][k];
        slot.v += v.v;
        slot.a += v.a;
      }
  }
  BracketResult res;
  // Entries at the rounding floor of their own accumulation are exact cancellations.
  std::vector<Term> terms;
  terms.reserve(accs[0].size());
  for (const auto& [k, slot] : accs[0]) {
    if (std::abs(slot.v) <= kCancellationUlps * std::numeric_limits<double>::epsilon() * slot.a)
      res.pruned_mass += std::abs(slot.v);
    else
      terms.push_back({k, slot.v});
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.key < b.key; });
  res.pruned_mass += prune_in_place(terms, kPruneRelative);
  auto value = HomogeneousHamiltonian::from_terms(degree, R, std::move(terms));
  if (degree > opt.max_degree) {
    res.value = HomogeneousHamiltonian(degree, R);
    res.overflow = std::move(value);
  } else {
    res.value = std::move(value);
  }
  return res;
}

HomogeneousHamiltonian bracket(const HomogeneousHamiltonian& h1, const HomogeneousHamiltonian& h2) {
  return poisson_bracket(h1, h2).value;
}

HomogeneousHamiltonian bracket(const QuadraticPart& q, const HomogeneousHamiltonian& g) {
  const int r = g.half();
  std::vector<Term> t;
  t.reserve(g.size());
  for (const auto& e : g.terms()) {
    double dw = 0.0;
    for (int i = 0; i < r; ++i)
      dw += q(e.key.idx[static_cast<std::size_t>(i)]) - q(e.key.idx[static_cast<std::size_t>(r + i)]);
    t.push_back({e.key, -kI * dw * e.coef});
  }
  return HomogeneousHamiltonian::from_terms(g.degree(), std::max(g.radius(), q.radius), std::move(t));
}

HomogeneousHamiltonian bracket(const HomogeneousHamiltonian& g, const QuadraticPart& q) {
  return bracket(q, g).scaled(-1.0);
}

namespace {
struct Marginals {
  int R;
  std::vector<double> odd, even;
  Marginals(const HomogeneousHamiltonian& h, int R_)
      : R(R_), odd(static_cast<std::size_t>(2 * R_ + 1)), even(static_cast<std::size_t>(2 * R_ + 1)) {
    const int r = h.half();
    for (const auto& t : h.terms()) {
      const double a = std::abs(t.coef);
      for (int i = 0; i < r; ++i) {
        odd[static_cast<std::size_t>(t.key.idx[static_cast<std::size_t>(i)] + R)] += a;
        even[static_cast<std::size_t>(t.key.idx[static_cast<std::size_t>(r + i)] + R)] += a;
      }
    }
  }
};
}  // namespace

double bracket_mass_bound(const HomogeneousHamiltonian& a, const HomogeneousHamiltonian& f) {
  const int R = std::max(a.radius(), f.radius());
  const Marginals ma(a, R), mf(f, R);
  double b = 0.0;
  for (std::size_t n = 0; n < ma.odd.size(); ++n) b += ma.odd[n] * mf.even[n] + ma.even[n] * mf.odd[n];
  return b;
}

double bracket_mass_bound(int degree_x, double mass_x, const HomogeneousHamiltonian& f) {
  const Marginals mf(f, f.radius());
  const double mo = *std::max_element(mf.odd.begin(), mf.odd.end());
  const double me = *std::max_element(mf.even.begin(), mf.even.end());
  return (mo + me) * (degree_x / 2) * mass_x;
}

std::pair<HomogeneousHamiltonian, HomogeneousHamiltonian> split_resonant(const HomogeneousHamiltonian& h, double K) {
  if (K < 0) throw std::invalid_argument("split_resonant: K must be >= 0");
  std::vector<Term> res, non;
  for (const auto& t : h.terms()) {
    const double d = std::abs(static_cast<double>(D_value(t.key, h.half())));
    (d <= K ? res : non).push_back(t);
  }
  return {HomogeneousHamiltonian::from_terms(h.degree(), h.radius(), std::move(res)),
          HomogeneousHamiltonian::from_terms(h.degree(), h.radius(), std::move(non))};
}

HomogeneousHamiltonian homological_solve(const HomogeneousHamiltonian& h) {
  std::vector<Term> t;
  t.reserve(h.size());
  for (const auto& e : h.terms()) {
    const long long d = D_value(e.key, h.half());
    if (d == 0) {
      const auto rep = representative(e.key, h.half());
      std::string s;
      for (int v : rep) s += std::to_string(v) + " ";
      throw ResonantClassError("homological_solve: class with D = 0: ( " + s + ")");
    }
    t.push_back({e.key, e.coef / (kI * static_cast<double>(d))});
  }
  return HomogeneousHamiltonian::from_terms(h.degree(), h.radius(), std::move(t));
}

HomogeneousHamiltonian homological_solve(const QuadraticPart& q, const HomogeneousHamiltonian& h) {
  const int r = h.half();
  std::vector<Term> t;
  t.reserve(h.size());
  for (const auto& e : h.terms()) {
    double dw = 0.0;
    for (int i = 0; i < r; ++i)
      dw += q(e.key.idx[static_cast<std::size_t>(i)]) - q(e.key.idx[static_cast<std::size_t>(r + i)]);
    if (dw == 0.0) throw ResonantClassError("homological_solve: class with vanishing weighted divisor");
    t.push_back({e.key, e.coef / (kI * dw)});
  }
  return HomogeneousHamiltonian::from_terms(h.degree(), h.radius(), std::move(t));
}

}  // namespace nlsnf
