#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "nlsnf/fourier_field.hpp"

namespace nlsnf {

/// Largest tensor degree that can be materialized (8 unconjugated + 8 conjugated slots).
inline constexpr int kMaxDegree = 16;

/// Canonical class of raw index tuples: the sorted odd-position (unconjugated)
/// indices followed by the sorted even-position (conjugated) indices. Slots past
/// the degree are zero. Ordering is lexicographic by (odd, even).
struct ClassKey {
  std::array<std::int16_t, kMaxDegree> idx{};

  auto operator<=>(const ClassKey&) const = default;
  bool operator==(const ClassKey&) const = default;

  std::span<const std::int16_t> odd(int half) const { return {idx.data(), static_cast<std::size_t>(half)}; }
  std::span<const std::int16_t> even(int half) const {
    return {idx.data() + half, static_cast<std::size_t>(half)};
  }
};

struct ClassKeyHash {
  std::size_t operator()(const ClassKey& k) const noexcept;
};

/// Builds the class of a multiset pair; inputs need not be sorted.
ClassKey make_key(std::span<const int> odd, std::span<const int> even);
/// Class of a raw tuple (n1, n2, ..., n_2r): odd positions unconjugated.
ClassKey key_from_tuple(std::span<const int> tuple);
/// Representative raw tuple (sorted odd and sorted even interleaved).
std::vector<int> representative(const ClassKey& key, int half);
/// Swaps the odd and even multisets.
ClassKey conjugate_key(const ClassKey& key, int half);

/// Throws std::invalid_argument unless the tuple has even length >= 2 and
/// zero alternating sum.
void check_tuple(std::span<const int> tuple);

// Phase divisor n1^2 - n2^2 + ... - n_2r^2.
long long D_value(std::span<const int> tuple);
// Sum (-1)^{j+1} m(n_j)^2 n_j^2.
double R_value(std::span<const int> tuple, const MultiplierSpec& spec);
// Sum (-1)^{j+1} m(n_j)^2 (n_j^2 + 2 mu).
double R_tilde_value(std::span<const int> tuple, const MultiplierSpec& spec, double mu);
// Sum (-1)^j |n_j|^{2s}, j counted from 1 (so the first entry enters with a minus sign).
double Ds_value(std::span<const int> tuple, double s);

long long D_value(const ClassKey& key, int half);
double R_value(const ClassKey& key, int half, const MultiplierSpec& spec);
double R_tilde_value(const ClassKey& key, int half, const MultiplierSpec& spec, double mu);

/// Number of distinct orderings of a sorted multiset.
double orderings(std::span<const std::int16_t> sorted);

}  // namespace nlsnf
