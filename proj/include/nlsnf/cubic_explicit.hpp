#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsnf/hamiltonian.hpp"

namespace nlsnf {

struct CubicContext {
  int M = 6;
  int N = 8;
  double beta = 0.25;
  double mu = 0.0;

  void validate() const;
  /// Resonance threshold N^beta for the sextic split.
  double K2() const;
};

/// n1^2 - n2^2 + n3^2 - n4^2, cross-checked against -2 (n1 - n2)(n3 - n2).
long long D1_value(std::span<const int> t);
long long D1_factored(std::span<const int> t);
long long D2_value(std::span<const int> t);

/// 2 mass(q)^2.
double R1_value(const FourierField& q);
HomogeneousHamiltonian build_R1_tensor(const CubicContext& ctx);
/// -sum |q_n|^4.
HomogeneousHamiltonian build_R2(const CubicContext& ctx);
/// Raw coefficient 1 / (-2 (n1 - n2)(n3 - n2)) on quadruples with n2 not in {n1, n3}.
HomogeneousHamiltonian build_F1(const CubicContext& ctx);
/// The generator with {H0, F} = -N: build_F1 / i.
HomogeneousHamiltonian build_F1_generator(const CubicContext& ctx);
/// The D != 0 part of the all-ones quartic.
HomogeneousHamiltonian build_cubic_nonresonant(const CubicContext& ctx);

HomogeneousHamiltonian build_I0(const CubicContext& ctx);
HomogeneousHamiltonian build_I1(const CubicContext& ctx);
HomogeneousHamiltonian build_I2(const CubicContext& ctx);

/// Restriction to |D| <= K (the sextic resonant part).
HomogeneousHamiltonian resonant_part(const HomogeneousHamiltonian& h, double K);

struct IdentityCheck {
  std::string name;
  double max_residual = 0.0;
  bool pass = false;
};

struct SubcaseScan {
  int N = 0;
  int M = 0;
  double beta = 0.0;
  double low_margin = 0.125;    // max(|n1|,|n2|,|n3|) <= low_margin * N
  double third_margin = 0.125;  // third-largest magnitude <= third_margin * sqrt(N)
  long long examined = 0;       // sextuples meeting every condition except n4 != n5
  long long violations = 0;     // of those, the ones with n4 != n5
  std::vector<std::vector<int>> examples;

  nlohmann::json to_json() const;
};

/// Exhaustive search over sextuples with the I2 exclusions, |D2| <= N^beta,
/// max |n_j| > N, small (n1, n2, n3) and a small third-largest magnitude.
SubcaseScan subcase_scan(int N, int M, double beta);

struct CubicReport {
  CubicContext ctx;
  std::vector<IdentityCheck> identities;
  std::vector<IdentityCheck> sign_variants;  // minus-sign forms that do not hold; informational
  nlohmann::json diagnostics;
  bool corrupted = false;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

inline constexpr double kIdentityTolerance = 1e-12;

/// Runs the quartic/sextic identities classwise. corrupt flips one F1
/// coefficient first (negative control). Throws ConfigError when M > 8.
CubicReport verify_cubic(const CubicContext& ctx, bool corrupt = false);

}  // namespace nlsnf
