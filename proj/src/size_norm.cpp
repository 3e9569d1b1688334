#include "nlsnf/size_norm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace nlsnf {

namespace {

double h1_weight(int n) { return 1.0 + std::abs(n); }

struct Caps {
  int R;
  std::vector<double> w;
  Caps(int R_, double C1, double C2) : R(R_), w(static_cast<std::size_t>(2 * R_ + 1)) {
    for (int n = -R; n <= R; ++n) w[static_cast<std::size_t>(n + R)] = std::min(C1, C2 / h1_weight(n));
  }
  double operator()(int n) const { return w[static_cast<std::size_t>(n + R)]; }
};

// Distinct values of a sorted run with multiplicities.
std::vector<std::pair<int, int>> runs(const std::int16_t* v, int r) {
  std::vector<std::pair<int, int>> out;
  int i = 0;
  while (i < r) {
    int j = i;
    while (j < r && v[j] == v[i]) ++j;
    out.push_back({v[i], j - i});
    i = j;
  }
  return out;
}

double cap_product(const std::int16_t* v, int r, const Caps& caps, int skip1, int skip2) {
  double p = 1.0;
  bool s1 = false, s2 = false;
  for (int i = 0; i < r; ++i) {
    if (!s1 && v[i] == skip1) {
      s1 = true;
      continue;
    }
    if (!s2 && v[i] == skip2) {
      s2 = true;
      continue;
    }
    p *= caps(v[i]);
  }
  return p;
}

double sigma_max(const Eigen::MatrixXd& B) {
  if (B.size() == 0 || B.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  return svd.singularValues()(0);
}

constexpr int kNone = 1 << 20;

}  // namespace

double norm_upper_bound(const HomogeneousHamiltonian& h, double C1, double C2) {
  if (!(C1 > 0) || !(C2 > 0)) throw std::invalid_argument("norm_upper_bound: budgets must be positive");
  if (h.empty()) return 0.0;
  const int R = h.radius(), L = 2 * R + 1, r = h.half();
  const Caps caps(R, C1, C2);
  Eigen::MatrixXd oe = Eigen::MatrixXd::Zero(L, L), oo = oe, ee = oe;
  const double rr = r, pairs = double(r) * (r - 1);
  for (const auto& t : h.terms()) {
    const double c = std::abs(t.coef);
    const std::int16_t* A = t.key.idx.data();
    const std::int16_t* B = A + r;
    const auto ra = runs(A, r), rb = runs(B, r);
    const double WA = cap_product(A, r, caps, kNone, kNone), WB = cap_product(B, r, caps, kNone, kNone);
    for (const auto& [x, ax] : ra)
      for (const auto& [y, by] : rb)
        oe(x + R, y + R) += c * (ax / rr) * (by / rr) * cap_product(A, r, caps, x, kNone) * cap_product(B, r, caps, y, kNone);
    if (r < 2) continue;
    for (const auto& [x, ax] : ra)
      for (const auto& [x2, ax2] : ra) {
        const double cnt = x == x2 ? double(ax) * (ax - 1) : double(ax) * ax2;
        if (cnt == 0) continue;
        oo(x + R, x2 + R) += c * cnt / pairs * cap_product(A, r, caps, x, x2) * WB;
      }
    for (const auto& [y, by] : rb)
      for (const auto& [y2, by2] : rb) {
        const double cnt = y == y2 ? double(by) * (by - 1) : double(by) * by2;
        if (cnt == 0) continue;
        ee(y + R, y2 + R) += c * cnt / pairs * cap_product(B, r, caps, y, y2) * WA;
      }
  }
  double s = sigma_max(oe);
  if (r >= 2) s = std::max({s, sigma_max(oo), sigma_max(ee)});
  return C1 * C1 * s;
}

namespace {

struct RawTensor {
  int slots;
  std::vector<int> idx;  // slots entries per tuple, offset by R
  std::vector<double> coef;
  std::size_t size() const { return coef.size(); }
};

RawTensor expand_raw(const HomogeneousHamiltonian& h, std::size_t limit) {
  const int r = h.half(), R = h.radius();
  RawTensor raw{2 * r, {}, {}};
  std::size_t total = 0;
  for (const auto& t : h.terms()) {
    total += static_cast<std::size_t>(orderings(t.key.odd(r)) * orderings(t.key.even(r)));
    if (total > limit) throw std::length_error("norm_lower_bound: raw tuple expansion exceeds the size guard");
  }
  raw.idx.reserve(total * static_cast<std::size_t>(2 * r));
  raw.coef.reserve(total);
  std::vector<int> a(static_cast<std::size_t>(r)), b(static_cast<std::size_t>(r));
  for (const auto& t : h.terms()) {
    std::copy(t.key.idx.begin(), t.key.idx.begin() + r, a.begin());
    const double c = std::abs(t.coef) / (orderings(t.key.odd(r)) * orderings(t.key.even(r)));
    do {
      std::copy(t.key.idx.begin() + r, t.key.idx.begin() + 2 * r, b.begin());
      do {
        for (int i = 0; i < r; ++i) {
          raw.idx.push_back(a[static_cast<std::size_t>(i)] + R);
          raw.idx.push_back(b[static_cast<std::size_t>(i)] + R);
        }
        raw.coef.push_back(c);
      } while (std::next_permutation(b.begin(), b.end()));
    } while (std::next_permutation(a.begin(), a.end()));
  }
  return raw;
}

double objective(const RawTensor& raw, const std::vector<std::vector<double>>& x) {
  double acc = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    double p = raw.coef[k];
    for (int j = 0; j < raw.slots; ++j) p *= x[static_cast<std::size_t>(j)][static_cast<std::size_t>(raw.idx[k * raw.slots + j])];
    acc += p;
  }
  return acc;
}

// argmax g.x over ||x|| <= C1 and, if dual, ||<n> x|| <= C2, x >= 0.
std::vector<double> best_response(const std::vector<double>& g, int R, double C1, double C2, bool dual) {
  double gn = 0.0;
  for (double v : g) gn += v * v;
  gn = std::sqrt(gn);
  if (gn == 0.0) return {};
  auto feasible = [&](double t) {
    std::vector<double> x(g.size());
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double w = h1_weight(static_cast<int>(i) - R);
      x[i] = g[i] / (1.0 + t * w * w);
      l2 += x[i] * x[i];
      h1 += w * w * x[i] * x[i];
    }
    double s = C1 / std::sqrt(l2);
    if (dual) s = std::min(s, C2 / std::sqrt(h1));
    double val = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      x[i] *= s;
      val += g[i] * x[i];
    }
    return std::make_pair(val, std::move(x));
  };
  if (!dual) return feasible(0.0).second;
  auto best = feasible(0.0);
  double best_lt = -30.0;
  for (double lt = -12.0; lt <= 8.0; lt += 0.25) {
    auto cand = feasible(std::pow(10.0, lt));
    if (cand.first > best.first) {
      best = std::move(cand);
      best_lt = lt;
    }
  }
  if (best_lt > -30.0) {
    double lo = best_lt - 0.25, hi = best_lt + 0.25;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 40; ++it) {
      const double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
      auto f1 = feasible(std::pow(10.0, m1)), f2 = feasible(std::pow(10.0, m2));
      if (f1.first > best.first) best = f1;
      if (f2.first > best.first) best = f2;
      if (f1.first >= f2.first)
        hi = m2;
      else
        lo = m1;
    }
  }
  return best.second;
}

}  // namespace

double norm_lower_bound(const HomogeneousHamiltonian& h, double C1, double C2, int iters, std::uint64_t seed,
                        std::size_t max_raw_tuples) {
  if (iters < 1) throw std::invalid_argument("norm_lower_bound: iters must be >= 1");
  if (!(C1 > 0) || !(C2 > 0)) throw std::invalid_argument("norm_lower_bound: budgets must be positive");
  if (h.empty()) return 0.0;
  const RawTensor raw = expand_raw(h, max_raw_tuples);
  const int R = h.radius(), L = 2 * R + 1, slots = raw.slots;

  // Exceptional pair representatives: slots within one parity are interchangeable.
  std::vector<std::pair<int, int>> pair_types{{0, 1}};
  if (slots >= 4) {
    pair_types.push_back({0, 2});
    pair_types.push_back({1, 3});
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  double best = 0.0;
  for (const auto& [ea, eb] : pair_types) {
    auto exceptional = [&](int j) { return j == ea || j == eb; };
    std::vector<std::vector<double>> x(static_cast<std::size_t>(slots), std::vector<double>(static_cast<std::size_t>(L)));
    for (int j = 0; j < slots; ++j) {
      std::vector<double> g(static_cast<std::size_t>(L));
      for (auto& v : g) v = u(rng);
      x[static_cast<std::size_t>(j)] = best_response(g, R, C1, C2, !exceptional(j));
    }
    double value = objective(raw, x);
    for (int sweep = 0; sweep < iters; ++sweep) {
      for (int j = 0; j < slots; ++j) {
        std::vector<double> g(static_cast<std::size_t>(L));
        for (std::size_t k = 0; k < raw.size(); ++k) {
          double p = raw.coef[k];
          for (int i = 0; i < slots; ++i)
            if (i != j) p *= x[static_cast<std::size_t>(i)][static_cast<std::size_t>(raw.idx[k * slots + i])];
          g[static_cast<std::size_t>(raw.idx[k * slots + j])] += p;
        }
        auto next = best_response(g, R, C1, C2, !exceptional(j));
        if (!next.empty()) x[static_cast<std::size_t>(j)] = std::move(next);
      }
      const double v = objective(raw, x);
      if (v <= value * (1 + 1e-14)) {
        value = std::max(value, v);
        break;
      }
      value = v;
    }
    best = std::max(best, value);
  }
  return best;
}

NormBounds norm_bounds(const HomogeneousHamiltonian& h, double C1, double C2, int iters, std::uint64_t seed) {
  NormBounds b;
  b.C1 = C1;
  b.C2 = C2;
  b.upper = norm_upper_bound(h, C1, C2);
  b.lower = norm_lower_bound(h, C1, C2, iters, seed);
  return b;
}

}  // namespace nlsnf
