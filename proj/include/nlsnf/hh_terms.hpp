#pragma once

#include <vector>

#include "nlsnf/hamiltonian.hpp"

namespace nlsnf {

struct HHTerms {
  double v1 = 0.0, v2 = 0.0, v3 = 0.0;
};

/// The three sums making up d/dt [sum m^2 w |q|^2 + N(Dq)] along the flow of
/// sum w |q|^2 + N, with p = Dq:
///   v1 = i sum m^2 w (conj(q) dN/dconj(q)(q) - q dN/dq(q))
///   v2 = i sum m w   (q dN/dq(p) - conj(q) dN/dconj(q)(p))
///   v3 = i sum m     (dN/dq(p) dN/dconj(q)(q) - dN/dq(q) dN/dconj(q)(p))
/// Throws RealityViolation when an imaginary residual exceeds 1e-10 * magnitude.
HHTerms hh_terms(const std::vector<HomogeneousHamiltonian>& pieces, const FourierField& q, const MultiplierSpec& spec,
                 const QuadraticPart& weights);

}  // namespace nlsnf
