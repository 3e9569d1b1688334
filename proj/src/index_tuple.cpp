#include "nlsnf/index_tuple.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

namespace nlsnf {

std::size_t ClassKeyHash::operator()(const ClassKey& k) const noexcept {
  std::uint64_t w[4];
  std::memcpy(w, k.idx.data(), sizeof(w));
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto v : w) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
  }
  return static_cast<std::size_t>(h);
}

namespace {
std::int16_t narrow(int n) {
  if (n < std::numeric_limits<std::int16_t>::min() || n > std::numeric_limits<std::int16_t>::max())
    throw std::out_of_range("index " + std::to_string(n) + " does not fit a class key");
  return static_cast<std::int16_t>(n);
}
}  // namespace

ClassKey make_key(std::span<const int> odd, std::span<const int> even) {
  if (odd.size() != even.size()) throw std::invalid_argument("make_key: unbalanced multisets");
  const auto half = odd.size();
  if (2 * half > static_cast<std::size_t>(kMaxDegree)) throw std::length_error("make_key: degree exceeds kMaxDegree");
  ClassKey k;
  for (std::size_t i = 0; i < half; ++i) {
    k.idx[i] = narrow(odd[i]);
    k.idx[half + i] = narrow(even[i]);
  }
  std::sort(k.idx.begin(), k.idx.begin() + static_cast<std::ptrdiff_t>(half));
  std::sort(k.idx.begin() + static_cast<std::ptrdiff_t>(half), k.idx.begin() + static_cast<std::ptrdiff_t>(2 * half));
  return k;
}

void check_tuple(std::span<const int> tuple) {
  if (tuple.size() < 2 || tuple.size() % 2 != 0)
    throw std::invalid_argument("index tuple must have even length >= 2");
  long long s = 0;
  for (std::size_t j = 0; j < tuple.size(); ++j) s += (j % 2 == 0 ? 1 : -1) * tuple[j];
  if (s != 0) throw std::invalid_argument("index tuple violates the zero alternating sum constraint");
}

ClassKey key_from_tuple(std::span<const int> tuple) {
  check_tuple(tuple);
  std::vector<int> odd, even;
  for (std::size_t j = 0; j < tuple.size(); ++j) (j % 2 == 0 ? odd : even).push_back(tuple[j]);
  return make_key(odd, even);
}

std::vector<int> representative(const ClassKey& key, int half) {
  std::vector<int> t(static_cast<std::size_t>(2 * half));
  for (int i = 0; i < half; ++i) {
    t[static_cast<std::size_t>(2 * i)] = key.idx[static_cast<std::size_t>(i)];
    t[static_cast<std::size_t>(2 * i + 1)] = key.idx[static_cast<std::size_t>(half + i)];
  }
  return t;
}

ClassKey conjugate_key(const ClassKey& key, int half) {
  ClassKey k;
  for (int i = 0; i < half; ++i) {
    k.idx[static_cast<std::size_t>(i)] = key.idx[static_cast<std::size_t>(half + i)];
    k.idx[static_cast<std::size_t>(half + i)] = key.idx[static_cast<std::size_t>(i)];
  }
  return k;
}

long long D_value(std::span<const int> tuple) {
  check_tuple(tuple);
  long long d = 0;
  for (std::size_t j = 0; j < tuple.size(); ++j) {
    const long long n = tuple[j];
    d += (j % 2 == 0 ? 1 : -1) * n * n;
  }
  return d;
}

double R_value(std::span<const int> tuple, const MultiplierSpec& spec) { return R_tilde_value(tuple, spec, 0.0); }

double R_tilde_value(std::span<const int> tuple, const MultiplierSpec& spec, double mu) {
  check_tuple(tuple);
  double r = 0.0;
  for (std::size_t j = 0; j < tuple.size(); ++j) {
    const double n = tuple[j];
    const double m = m_value(spec, tuple[j]);
    r += (j % 2 == 0 ? 1.0 : -1.0) * m * m * (n * n + 2.0 * mu);
  }
  return r;
}

double Ds_value(std::span<const int> tuple, double s) {
  check_tuple(tuple);
  double d = 0.0;
  for (std::size_t j = 0; j < tuple.size(); ++j)
    d += (j % 2 == 0 ? -1.0 : 1.0) * std::pow(std::abs(static_cast<double>(tuple[j])), 2.0 * s);
  return d;
}

long long D_value(const ClassKey& key, int half) {
  long long d = 0;
  for (int i = 0; i < half; ++i) {
    const long long a = key.idx[static_cast<std::size_t>(i)];
    const long long b = key.idx[static_cast<std::size_t>(half + i)];
    d += a * a - b * b;
  }
  return d;
}

double R_value(const ClassKey& key, int half, const MultiplierSpec& spec) {
  return R_tilde_value(key, half, spec, 0.0);
}

double R_tilde_value(const ClassKey& key, int half, const MultiplierSpec& spec, double mu) {
  double r = 0.0;
  for (int i = 0; i < half; ++i) {
    const int a = key.idx[static_cast<std::size_t>(i)];
    const int b = key.idx[static_cast<std::size_t>(half + i)];
    const double ma = m_value(spec, a), mb = m_value(spec, b);
    r += ma * ma * (double(a) * a + 2.0 * mu) - mb * mb * (double(b) * b + 2.0 * mu);
  }
  return r;
}

double orderings(std::span<const std::int16_t> sorted) {
  double total = std::tgamma(static_cast<double>(sorted.size()) + 1.0);
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    total /= std::tgamma(static_cast<double>(j - i) + 1.0);
    i = j;
  }
  return std::round(total);
}

}  // namespace nlsnf
