#pragma once

#include <cstdint>

#include "nlsnf/hamiltonian.hpp"

namespace nlsnf {

/// Two-sided enclosure of the multilinear size norm: the supremum of
/// sum |c| prod |q^(j)_{n_j}| over factors with ||q||_{L2} <= C1, all but two
/// of them also with ||q||_{H1} <= C2 (H1 weight <n> = 1 + |n|).
struct NormBounds {
  double lower = 0.0;
  double upper = 0.0;
  double C1 = 1.0;
  double C2 = 1.0;
};

/// Certified: C1^2 * max over exceptional slot pairs of sigma_max(B), where B
/// collects |c| times the pointwise caps min(C1, C2/<n>) of the other slots.
double norm_upper_bound(const HomogeneousHamiltonian& h, double C1, double C2);

/// Objective value at the best factor assignment found by block coordinate
/// ascent. Throws std::length_error when the raw tuple expansion exceeds
/// max_raw_tuples.
double norm_lower_bound(const HomogeneousHamiltonian& h, double C1, double C2, int iters, std::uint64_t seed,
                        std::size_t max_raw_tuples = 4'000'000);

NormBounds norm_bounds(const HomogeneousHamiltonian& h, double C1, double C2, int iters = 20, std::uint64_t seed = 1);

}  // namespace nlsnf
