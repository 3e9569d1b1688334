#include "nlsnf/lie_flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsnf/errors.hpp"

namespace nlsnf {

void FlowConfig::validate() const {
  if (!(dt > 0.0) || dt > 0.1) throw ConfigError("FlowConfig: dt must lie in (0, 0.1], got " + std::to_string(dt));
  if (method_order != 4) throw ConfigError("FlowConfig: method_order is fixed at 4");
}

FourierField f_flow_rhs(const HomogeneousHamiltonian& f, const FourierField& q) {
  const int r = std::max(f.radius(), q.radius());
  const FourierField qq = q.radius() == r ? q : q.resized(r);
  if (f.empty()) return FourierField(r);
  auto g = gradient_bar(f, qq);
  if (g.radius() != r) g = g.resized(r);
  return g * cplx(0.0, 1.0);
}

namespace {

void guard(const FourierField& q, double t) {
  for (const auto& c : q.coeffs())
    if (!(std::abs(c) <= kBlowUpThreshold))
      throw BlowUpError("integrate_flow: coefficient magnitude exceeded 1e6 at t = " + std::to_string(t));
}

}  // namespace

FourierField integrate_flow(const FourierField& q0, const HomogeneousHamiltonian& f, double t,
                            const FlowConfig& cfg) {
  cfg.validate();
  const int r = std::max(f.radius(), q0.radius());
  FourierField q = q0.radius() == r ? q0 : q0.resized(r);
  if (t == 0.0 || f.empty()) return q;
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / cfg.dt - 1e-9)));
  const double h = t / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) {
    const auto k1 = f_flow_rhs(f, q);
    const auto k2 = f_flow_rhs(f, q + k1 * cplx(h / 2));
    const auto k3 = f_flow_rhs(f, q + k2 * cplx(h / 2));
    const auto k4 = f_flow_rhs(f, q + k3 * cplx(h));
    q = q + (k1 + k2 * cplx(2.0) + k3 * cplx(2.0) + k4) * cplx(h / 6);
    guard(q, h * static_cast<double>(k + 1));
  }
  return q;
}

FourierField lie_transform(const FourierField& q, const HomogeneousHamiltonian& f, const FlowConfig& cfg) {
  return integrate_flow(q, f, 1.0, cfg);
}

FourierField inverse_lie_transform(const FourierField& q, const HomogeneousHamiltonian& f, const FlowConfig& cfg) {
  return integrate_flow(q, f, -1.0, cfg);
}

}  // namespace nlsnf
