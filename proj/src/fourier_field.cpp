#include "nlsnf/fourier_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nlsnf/errors.hpp"
#include "nlsnf/spectral_grid.hpp"

namespace nlsnf {

FourierField::FourierField(int radius)
    : radius_(radius), coeffs_(static_cast<std::size_t>(2 * radius + 1)) {
  if (radius < 0) throw std::invalid_argument("FourierField: negative radius");
}

FourierField::FourierField(int radius, std::vector<cplx> coeffs) : radius_(radius), coeffs_(std::move(coeffs)) {
  if (radius < 0) throw std::invalid_argument("FourierField: negative radius");
  if (coeffs_.size() != static_cast<std::size_t>(2 * radius + 1))
    throw std::invalid_argument("FourierField: expected 2M+1 coefficients");
  for (const auto& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("FourierField: non-finite coefficient");
}

FourierField FourierField::delta(int radius, int n, cplx amplitude) {
  if (std::abs(n) > radius) throw std::invalid_argument("FourierField::delta: mode outside radius");
  std::vector<cplx> c(static_cast<std::size_t>(2 * radius + 1));
  c[static_cast<std::size_t>(n + radius)] = amplitude;
  return FourierField(radius, std::move(c));
}

FourierField FourierField::resized(int radius) const {
  std::vector<cplx> c(static_cast<std::size_t>(2 * radius + 1));
  for (int n = -radius; n <= radius; ++n) c[static_cast<std::size_t>(n + radius)] = (*this)[n];
  return FourierField(radius, std::move(c));
}

FourierField FourierField::operator*(cplx a) const {
  auto c = coeffs_;
  for (auto& v : c) v *= a;
  return FourierField(radius_, std::move(c));
}

FourierField FourierField::operator+(const FourierField& other) const {
  const int r = std::max(radius_, other.radius_);
  std::vector<cplx> c(static_cast<std::size_t>(2 * r + 1));
  for (int n = -r; n <= r; ++n) c[static_cast<std::size_t>(n + r)] = (*this)[n] + other[n];
  return FourierField(r, std::move(c));
}

FourierField FourierField::operator-(const FourierField& other) const { return *this + other * cplx{-1.0}; }

FourierField FourierField::conj() const {
  auto c = coeffs_;
  for (auto& v : c) v = std::conj(v);
  return FourierField(radius_, std::move(c));
}

MultiplierSpec::MultiplierSpec(int cutoff, double sobolev) : N(cutoff), s(sobolev) {
  if (cutoff < 1) throw std::invalid_argument("MultiplierSpec: N must be >= 1");
  if (!(sobolev > 1.0)) throw std::invalid_argument("MultiplierSpec: s must be > 1");
}

double weight(int n, WeightKind kind) {
  const double a = std::abs(static_cast<double>(n));
  return kind == WeightKind::Bracket ? 1.0 + a : a;
}

double sobolev_norm(const FourierField& q, double s, WeightKind kind) {
  if (s < 0) throw std::invalid_argument("sobolev_norm: s must be nonnegative");
  double acc = 0.0;
  for (int n = -q.radius(); n <= q.radius(); ++n) {
    const double a2 = std::norm(q[n]);
    if (a2 == 0.0) continue;
    const double w = weight(n, kind);
    acc += std::pow(w, 2.0 * s) * a2;
  }
  return std::sqrt(acc);
}

double mass(const FourierField& q) {
  double acc = 0.0;
  for (const auto& c : q.coeffs()) acc += std::norm(c);
  return acc;
}

double momentum(const FourierField& q) {
  double acc = 0.0;
  for (int n = -q.radius(); n <= q.radius(); ++n) acc += n * std::norm(q[n]);
  return acc;
}

double m_value(const MultiplierSpec& spec, int n) {
  const int a = std::abs(n);
  if (a <= spec.N) return 1.0;
  return std::pow(static_cast<double>(a) / spec.N, spec.s - 1.0);
}

FourierField apply_multiplier(const FourierField& q, const MultiplierSpec& spec) {
  std::vector<cplx> c(q.size());
  for (int n = -q.radius(); n <= q.radius(); ++n) c[static_cast<std::size_t>(n + q.radius())] = m_value(spec, n) * q[n];
  return FourierField(q.radius(), std::move(c));
}

FourierField project_high(const FourierField& q, int N) {
  if (N < 0) throw std::invalid_argument("project_high: N must be >= 0");
  std::vector<cplx> c(q.size());
  for (int n = -q.radius(); n <= q.radius(); ++n)
    if (std::abs(n) >= N) c[static_cast<std::size_t>(n + q.radius())] = q[n];
  return FourierField(q.radius(), std::move(c));
}

std::vector<cplx> to_physical(const FourierField& q, int gridsize) {
  if (gridsize < 2 * q.radius() + 1)
    throw SizingError("to_physical: gridsize " + std::to_string(gridsize) + " < 2M+1 = " +
                      std::to_string(2 * q.radius() + 1));
  std::vector<cplx> spec(static_cast<std::size_t>(gridsize));
  for (int n = -q.radius(); n <= q.radius(); ++n) spec[static_cast<std::size_t>((n + gridsize) % gridsize)] = q[n];
  std::vector<cplx> out(spec.size());
  SpectralGrid grid(gridsize);
  grid.backward(spec, out);
  return out;
}

FourierField from_physical(std::span<const cplx> samples, int radius) {
  const int g = static_cast<int>(samples.size());
  if (g < 1) throw SizingError("from_physical: empty sample vector");
  if (radius < 0) radius = (g - 1) / 2;
  if (g < 2 * radius + 1) throw SizingError("from_physical: radius too large for sample count");
  std::vector<cplx> spec(samples.size());
  SpectralGrid grid(g);
  grid.forward(samples, spec);
  std::vector<cplx> c(static_cast<std::size_t>(2 * radius + 1));
  const double inv = 1.0 / g;
  for (int n = -radius; n <= radius; ++n)
    c[static_cast<std::size_t>(n + radius)] = spec[static_cast<std::size_t>((n + g) % g)] * inv;
  return FourierField(radius, std::move(c));
}

nlohmann::json field_to_json(const FourierField& q) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int n = -q.radius(); n <= q.radius(); ++n) {
    const cplx v = q[n];
    if (v == cplx{}) continue;
    coeffs.push_back({n, v.real(), v.imag()});
  }
  return {{"M", q.radius()}, {"coeffs", std::move(coeffs)}};
}

FourierField field_from_json(const nlohmann::json& j) {
  const int radius = j.at("M").get<int>();
  std::vector<cplx> c(static_cast<std::size_t>(2 * radius + 1));
  for (const auto& e : j.at("coeffs")) {
    const int n = e.at(0).get<int>();
    if (std::abs(n) > radius) throw std::invalid_argument("field_from_json: index outside radius");
    c[static_cast<std::size_t>(n + radius)] = {e.at(1).get<double>(), e.at(2).get<double>()};
  }
  return FourierField(radius, std::move(c));
}

}  // namespace nlsnf
