#pragma once
// Test-side generators and brute-force oracles. Nothing here calls the
// library's bracket or canonicalization code paths it is meant to check.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "nlsnf/fourier_field.hpp"
#include "nlsnf/hamiltonian.hpp"

namespace nlsnf::testing {

inline FourierField random_field(int M, std::uint64_t seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> c(static_cast<std::size_t>(2 * M + 1));
  for (auto& v : c) v = amp * cplx(g(rng), g(rng));
  return FourierField(M, std::move(c));
}

inline FourierField random_field_hs(int M, std::uint64_t seed, double s, double target) {
  auto q = random_field(M, seed);
  const double n = sobolev_norm(q, s);
  return q * cplx(target / n);
}

// Random zero-alternating-sum tuple of length 2r with entries in [-M, M].
inline std::vector<int> random_tuple(int r, int M, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-M, M);
  for (;;) {
    std::vector<int> t(static_cast<std::size_t>(2 * r));
    long long s = 0;
    for (int j = 0; j + 1 < 2 * r; ++j) {
      t[static_cast<std::size_t>(j)] = u(rng);
      s += (j % 2 == 0 ? 1 : -1) * t[static_cast<std::size_t>(j)];
    }
    // last slot is even (conjugated): s - t_last = 0
    if (std::abs(s) <= M) {
      t.back() = static_cast<int>(s);
      return t;
    }
  }
}

inline long long raw_D(const std::vector<int>& t) {
  long long d = 0;
  for (std::size_t j = 0; j < t.size(); ++j) d += (j % 2 == 0 ? 1 : -1) * 1LL * t[j] * t[j];
  return d;
}

// Reality-symmetric random tensor: each drawn class gets c, its conjugate
// class gets conj(c). Optional filter on raw tuples.
inline HomogeneousHamiltonian random_tensor(int degree, int M, int nterms, std::uint64_t seed,
                                            std::function<bool(const std::vector<int>&)> keep = {}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  TensorBuilder b(degree, M);
  int made = 0;
  while (made < nterms) {
    auto t = random_tuple(degree / 2, M, rng);
    if (keep && !keep(t)) continue;
    const cplx c(g(rng), g(rng));
    std::vector<int> conj_t(t.size());
    for (std::size_t j = 0; j < t.size(); j += 2) {
      conj_t[j] = t[j + 1];
      conj_t[j + 1] = t[j];
    }
    b.add_tuple(t, c);
    b.add_tuple(conj_t, std::conj(c));
    ++made;
  }
  return std::move(b).build();
}

inline HomogeneousHamiltonian random_nonresonant(int degree, int M, int nterms, std::uint64_t seed) {
  return random_tensor(degree, M, nterms, seed, [](const std::vector<int>& t) { return raw_D(t) != 0; });
}

// Enumerates every raw tuple of length 2r over [-M, M]^{2r} with zero alternating sum.
inline void for_each_raw_tuple(int r, int M, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(static_cast<std::size_t>(2 * r));
  std::function<void(int, long long)> rec = [&](int j, long long s) {
    if (j == 2 * r - 1) {
      if (std::abs(s) <= M) {
        t.back() = static_cast<int>(s);
        fn(t);
      }
      return;
    }
    for (int v = -M; v <= M; ++v) {
      t[static_cast<std::size_t>(j)] = v;
      rec(j + 1, s + (j % 2 == 0 ? v : -v));
    }
  };
  rec(0, 0);
}

inline cplx raw_monomial(const std::vector<int>& t, const FourierField& q) {
  cplx m = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) m *= (j % 2 == 0) ? q[t[j]] : std::conj(q[t[j]]);
  return m;
}

// Wirtinger derivatives of a complex functional by central differences.
struct FdGradient {
  std::vector<cplx> d_unbar, d_bar;  // index n + M
};

inline FdGradient fd_gradient(const std::function<cplx(const FourierField&)>& f, const FourierField& q,
                              double h = 1e-5) {
  const int M = q.radius();
  FdGradient out;
  out.d_unbar.resize(q.size());
  out.d_bar.resize(q.size());
  for (int n = -M; n <= M; ++n) {
    const auto ex = FourierField::delta(M, n, h), ey = FourierField::delta(M, n, cplx(0, h));
    const cplx dx = (f(q + ex) - f(q - ex)) / (2 * h);
    const cplx dy = (f(q + ey) - f(q - ey)) / (2 * h);
    out.d_unbar[static_cast<std::size_t>(n + M)] = 0.5 * (dx - cplx(0, 1) * dy);
    out.d_bar[static_cast<std::size_t>(n + M)] = 0.5 * (dx + cplx(0, 1) * dy);
  }
  return out;
}

inline double max_abs_diff(const HomogeneousHamiltonian& a, const HomogeneousHamiltonian& b) {
  return (a - b).max_abs();
}

}  // namespace nlsnf::testing
