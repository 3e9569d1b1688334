#pragma once

#include <map>
#include <vector>

#include <json.hpp>

#include "nlsnf/hamiltonian.hpp"

namespace nlsnf {

struct ReductionConfig {
  double K = 1.0;
  int taylor_order = 3;
  int max_degree = 8;
  int steps = 3;
  double remainder_threshold = 1e-12;
  double C1 = 1.0;  // size-norm budgets used for tagging and reporting
  double C2 = 1.0;
  int threads = 0;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Default degree cap: 8 for the cubic equation, 2p + 6 in general.
int default_max_degree(int p);

/// Higher-degree content that was bounded rather than materialized.
struct OverflowRecord {
  int degree = 0;
  double mass_bound = 0.0;  // certified bound on the l1 coefficient mass
  double norm_bound = 0.0;  // C1^degree * mass_bound, a certified size-norm bound
};

struct LieSeriesOptions {
  int order = 3;
  int max_degree = 8;
  bool materialize_overflow = false;
  int threads = 0;
  double C1 = 1.0;
};

struct LieSeriesResult {
  /// terms[k] = (1/k!) ad_F^k G, for every k whose degree fits the cap.
  std::vector<HomogeneousHamiltonian> terms;
  /// Materialized overflow terms (only with materialize_overflow).
  std::vector<HomogeneousHamiltonian> overflow;
  /// Overflow content; exact masses when materialized, certified bounds otherwise.
  std::vector<OverflowRecord> overflow_records;
  double pruned_mass = 0.0;
};

/// sum_{k=0}^{order} (1/k!) {...{G, F}, ..., F}.
LieSeriesResult lie_series(const HomogeneousHamiltonian& g, const HomogeneousHamiltonian& f,
                           const LieSeriesOptions& opt);
/// Series of a quadratic part; terms[0] is empty and terms[1] = {Q, F}.
LieSeriesResult lie_series(const QuadraticPart& q, const HomogeneousHamiltonian& f, const LieSeriesOptions& opt);

struct StepReport {
  int step = 0;
  int degree_min = 0;               // degree of the eliminated nonresonant piece
  double nonres_norm_before = 0.0;  // summed upper bounds over nonresonant pieces
  double nonres_norm_upper = 0.0;
  double res_norm_upper = 0.0;
  double remainder_norm_upper = 0.0;  // materialized remainder plus overflow bounds
  double overflow_mass = 0.0;
  double pruned_mass = 0.0;
  double transport_mass = 0.0;         // bound on Lie corrections of carried remainder pieces
  double cancellation_residual = 0.0;  // max |c| left on target classes / max |c| of target
  int min_nonres_degree_after = 0;     // 0 when no nonresonant piece is left

  nlohmann::json to_json() const;
};

struct ReductionReport {
  std::vector<StepReport> steps;
  bool converged = true;  // false when nonresonant content was folded into the remainder
  double residual_nonres_norm = 0.0;

  nlohmann::json to_json() const;
};

/// H0 + N0 + N_r. The quadratic weights are quadratic(n) + mu_shift_factor * mass(q).
struct ReducedHamiltonian {
  QuadraticPart quadratic;
  double mu_shift_factor = 0.0;
  double K = 0.0;
  std::vector<HomogeneousHamiltonian> resonant;
  std::vector<HomogeneousHamiltonian> remainder;
  std::vector<OverflowRecord> overflow;

  int radius() const { return quadratic.radius; }
  QuadraticPart weights_for(const FourierField& q) const;
  /// sum m^2 w |q|^2 + N0(Dq).
  double modified_energy(const FourierField& q, const MultiplierSpec& spec) const;

  nlohmann::json to_json() const;
  static ReducedHamiltonian from_json(const nlohmann::json& j);
};

/// Sums pieces per degree, splits by K, tags pieces below the threshold as Remainder.
HamiltonianSum retag(const QuadraticPart& q, const std::vector<HomogeneousHamiltonian>& pieces, double K,
                     double remainder_threshold, double C1, double C2);

struct StepResult {
  HamiltonianSum hamiltonian;
  StepReport report;
  std::vector<OverflowRecord> overflow;
};

StepResult reduce_step(const HamiltonianSum& h, const ReductionConfig& cfg);

struct ReductionResult {
  ReducedHamiltonian reduced;
  ReductionReport report;
};

ReductionResult reduce(const HamiltonianSum& h, const ReductionConfig& cfg, double mu_shift_factor = 0.0);

/// H0 + nonlinearity of power p, split at K.
HamiltonianSum nls_hamiltonian(int p, int radius, double K);
/// Cubic start with the mass term moved into the quadratic part: the diagonal
/// quartic R2 (resonant) plus the D != 0 quartic, split at K (K = 0 keeps all of
/// it nonresonant). Reduce it with mu_shift_factor = 2.
HamiltonianSum cubic_start_hamiltonian(int radius, double K = 0.0);

}  // namespace nlsnf
