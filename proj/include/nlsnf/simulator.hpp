#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsnf/fourier_field.hpp"
#include "nlsnf/normal_form.hpp"

namespace nlsnf {

struct InitialCondition {
  enum class Kind { PlaneWave, Random };
  Kind kind = Kind::Random;
  int k = 1;                  // plane wave mode
  cplx amplitude = 1.0;       // plane wave amplitude
  double hs_norm = 1.0;       // random data normalized to this H^s norm
  double decay_offset = 0.6;  // random data decay <n>^{-(s + decay_offset)}
};

struct SimulationConfig {
  int p = 1;
  int M = 32;
  int gridsize = 0;  // 0: smallest 5-smooth size >= 2(p+1)M + 1
  double dt = 1e-3;
  double T = 1.0;
  double s = 1.5;
  int N = 8;
  InitialCondition ic;
  std::uint64_t seed = 1;
  int record_every = 100;

  int resolved_gridsize() const;
  /// ConfigError on bad fields, SizingError when gridsize is below the dealiasing bound.
  void validate() const;
  nlohmann::json to_json() const;
  static SimulationConfig from_json(const nlohmann::json& j);
};

/// Smallest 2^a 3^b 5^c >= n.
int smooth_size(int n);
int dealiased_gridsize(int p, int M);

FourierField initial_condition(const SimulationConfig& cfg);

/// Coefficients of |u|^{2p} u on the lattice of q, via a zero-padded grid.
FourierField nonlinearity(const FourierField& q, int p, int gridsize);

/// (1/2) int |u_x|^2 + 1/(2p+2) int |u|^{2p+2} over [0, 2 pi).
double hamiltonian_physical(const FourierField& q, int p, int gridsize);

/// Integrating-factor RK4 for q' = i n^2 q + i (|u|^{2p} u)_n. Holds the FFT
/// plans; one instance per thread.
class NlsStepper {
 public:
  NlsStepper(int p, int M, int gridsize);
  ~NlsStepper();
  NlsStepper(const NlsStepper&) = delete;
  NlsStepper& operator=(const NlsStepper&) = delete;

  FourierField nonlinearity(const FourierField& q);
  double hamiltonian(const FourierField& q);
  /// Throws BlowUpError when a coefficient exceeds 1e6.
  FourierField step(const FourierField& q, double dt);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FourierField step(const FourierField& q, double dt, const SimulationConfig& cfg);

struct TimeSeriesRow {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double hamiltonian = 0.0;
  double hs_norm = 0.0;
  double d_h1_norm = 0.0;
  std::optional<double> modified_energy, hh1, hh2, hh3;
};

struct TimeSeries {
  std::vector<TimeSeriesRow> rows;
  bool aborted = false;
  std::string abort_reason;
  FourierField final_state;

  void write_csv(std::ostream& os) const;
  static TimeSeries read_csv(std::istream& is);
};

/// Integrates to cfg.T, recording at t = 0, every record_every steps and at T.
/// With a reduced Hamiltonian, also records the modified energy and the three
/// hh sums of its resonant part. A blow-up ends the run with aborted = true.
TimeSeries run(const SimulationConfig& cfg, const ReducedHamiltonian* reduced = nullptr);

struct GrowthFit {
  double alpha = 0.0;
  std::optional<double> r2;  // empty for a constant series
};

/// Least-squares slope of log hs_norm against log(1 + t). Needs >= 10 rows.
GrowthFit growth_fit(const TimeSeries& series);

struct DsScanResult {
  double max_ratio = 0.0;
  std::vector<int> argmax;
  long long evaluated = 0;

  nlohmann::json to_json() const;
};

/// |D_s(n)| / ((n1*)^{2(s-1)} (n3* n4* + K)) with n_j* the ordered magnitudes.
double ds_ratio(std::span<const int> tuple, double s, double K);
/// Every zero-sum tuple of the given degree over [-range, range].
DsScanResult ds_lemma_exhaustive(double s, double K, int range, int degree = 4, bool resonant_only = false);
/// Random zero-sum tuples of degree 4, 6 or 8 over [-range, range]. With
/// resonant_only, the last two entries are solved for so that |D| < K.
DsScanResult ds_lemma_scan(double s, double K, int range, long long samples, std::uint64_t seed,
                           bool resonant_only = false);

}  // namespace nlsnf
