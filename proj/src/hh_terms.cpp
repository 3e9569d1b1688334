#include "nlsnf/hh_terms.hpp"

#include <cmath>
#include <string>

#include "nlsnf/errors.hpp"

namespace nlsnf {

namespace {

double real_part_checked(cplx v, double magnitude, const char* what) {
  if (std::abs(v.imag()) > 1e-10 * magnitude + 1e-14)
    throw RealityViolation(std::string("hh_terms: ") + what + " has imaginary residual " + std::to_string(v.imag()));
  return v.real();
}

}  // namespace

HHTerms hh_terms(const std::vector<HomogeneousHamiltonian>& pieces, const FourierField& q, const MultiplierSpec& spec,
                 const QuadraticPart& weights) {
  HHTerms out;
  if (pieces.empty()) return out;
  int R = q.radius();
  for (const auto& h : pieces) R = std::max(R, h.radius());
  const FourierField qq = q.resized(R);
  const FourierField p = apply_multiplier(qq, spec);
  FourierField gb_q(R), gu_q(R), gb_p(R), gu_p(R);
  for (const auto& h : pieces) {
    gb_q = gb_q + gradient_bar(h, qq);
    gu_q = gu_q + gradient_unbar(h, qq);
    gb_p = gb_p + gradient_bar(h, p);
    gu_p = gu_p + gradient_unbar(h, p);
  }
  const cplx I(0.0, 1.0);
  cplx v1{}, v2{}, v3{};
  double a1 = 0, a2 = 0, a3 = 0;
  for (int n = -R; n <= R; ++n) {
    const double m = m_value(spec, n), w = weights(n);
    const cplx t1 = m * m * w * (std::conj(qq[n]) * gb_q[n] - qq[n] * gu_q[n]);
    const cplx t2 = m * w * (qq[n] * gu_p[n] - std::conj(qq[n]) * gb_p[n]);
    const cplx t3 = m * (gu_p[n] * gb_q[n] - gu_q[n] * gb_p[n]);
    v1 += t1;
    v2 += t2;
    v3 += t3;
    const double aq = std::abs(qq[n]);
    a1 += m * m * std::abs(w) * aq * (std::abs(gb_q[n]) + std::abs(gu_q[n]));
    a2 += m * std::abs(w) * aq * (std::abs(gu_p[n]) + std::abs(gb_p[n]));
    a3 += m * (std::abs(gu_p[n]) * std::abs(gb_q[n]) + std::abs(gu_q[n]) * std::abs(gb_p[n]));
  }
  out.v1 = real_part_checked(I * v1, a1, "v1");
  out.v2 = real_part_checked(I * v2, a2, "v2");
  out.v3 = real_part_checked(I * v3, a3, "v3");
  return out;
}

}  // namespace nlsnf
