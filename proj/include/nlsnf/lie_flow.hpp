#pragma once

#include "nlsnf/fourier_field.hpp"
#include "nlsnf/hamiltonian.hpp"

namespace nlsnf {

struct FlowConfig {
  double dt = 1e-3;
  int method_order = 4;

  /// Throws ConfigError unless 0 < dt <= 0.1 and method_order == 4.
  void validate() const;
};

inline constexpr double kBlowUpThreshold = 1e6;

/// i dF/d(conj q), on the larger of the two lattices.
FourierField f_flow_rhs(const HomogeneousHamiltonian& f, const FourierField& q);

/// Classical RK4 for q' = i dF/d(conj q) up to time t. The last step is
/// shortened to land on t. Throws BlowUpError when a coefficient exceeds 1e6.
FourierField integrate_flow(const FourierField& q0, const HomogeneousHamiltonian& f, double t,
                            const FlowConfig& cfg);

/// Time-1 map; the inverse is integrate_flow(q, f, -1, cfg).
FourierField lie_transform(const FourierField& q, const HomogeneousHamiltonian& f, const FlowConfig& cfg);
FourierField inverse_lie_transform(const FourierField& q, const HomogeneousHamiltonian& f, const FlowConfig& cfg);

}  // namespace nlsnf
