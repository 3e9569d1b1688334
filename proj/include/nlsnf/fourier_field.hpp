#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace nlsnf {

using cplx = std::complex<double>;

/// Finitely supported Fourier coefficients q_n, |n| <= M, stored densely.
///
/// Reads outside [-M, M] return zero. Values are immutable once constructed;
/// every transformation returns a new field.
class FourierField {
 public:
  FourierField() = default;
  explicit FourierField(int radius);
  FourierField(int radius, std::vector<cplx> coeffs);

  static FourierField delta(int radius, int n, cplx amplitude = 1.0);

  int radius() const { return radius_; }
  std::size_t size() const { return coeffs_.size(); }

  cplx operator[](int n) const {
    return (n < -radius_ || n > radius_) ? cplx{} : coeffs_[static_cast<std::size_t>(n + radius_)];
  }

  std::span<const cplx> coeffs() const { return coeffs_; }

  // Copy with a different truncation radius (zero padding or truncation).
  FourierField resized(int radius) const;

  FourierField operator*(cplx a) const;
  FourierField operator+(const FourierField& other) const;
  FourierField operator-(const FourierField& other) const;
  FourierField conj() const;

 private:
  int radius_ = 0;
  std::vector<cplx> coeffs_{cplx{}};
};

/// Sobolev index and cutoff defining the multiplier m(n).
struct MultiplierSpec {
  int N = 1;
  double s = 2.0;

  MultiplierSpec() = default;
  MultiplierSpec(int cutoff, double sobolev);
};

enum class WeightKind {
  Bracket,      // <n> = 1 + |n|
  Homogeneous,  // |n|
};

double weight(int n, WeightKind kind);

double sobolev_norm(const FourierField& q, double s, WeightKind kind = WeightKind::Bracket);
double mass(const FourierField& q);
// Sum n |q_n|^2; the 2*pi of the physical momentum is dropped.
double momentum(const FourierField& q);

double m_value(const MultiplierSpec& spec, int n);
FourierField apply_multiplier(const FourierField& q, const MultiplierSpec& spec);
// Keeps |n| >= N.
FourierField project_high(const FourierField& q, int N);

/// u(x_j) = sum_n q_n e^{i n x_j}, x_j = 2 pi j / gridsize. Needs gridsize >= 2M+1.
std::vector<cplx> to_physical(const FourierField& q, int gridsize);
/// Inverse of to_physical; the radius defaults to (gridsize-1)/2.
FourierField from_physical(std::span<const cplx> samples, int radius = -1);

nlohmann::json field_to_json(const FourierField& q);
FourierField field_from_json(const nlohmann::json& j);

}  // namespace nlsnf
