#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "nlsnf/errors.hpp"
#include "nlsnf/index_tuple.hpp"
#include "nlsnf/simulator.hpp"
#include "support.hpp"

using namespace nlsnf;
using namespace nlsnf::testing;

namespace {

// (|u|^{2p} u)_n by direct convolution over zero-sum (2p+1)-tuples.
FourierField convolution_oracle(const FourierField& q, int p) {
  const int M = q.radius();
  std::vector<cplx> out(q.size());
  std::vector<int> t(static_cast<std::size_t>(2 * p + 1));
  auto rec = [&](auto&& self, int j, cplx acc, long long sum) -> void {
    if (j == 2 * p + 1) {
      if (std::llabs(sum) <= M) out[static_cast<std::size_t>(sum + M)] += acc;
      return;
    }
    for (int v = -M; v <= M; ++v) {
      const cplx f = (j % 2 == 0) ? q[v] : std::conj(q[v]);
      self(self, j + 1, acc * f, sum + (j % 2 == 0 ? v : -v));
    }
  };
  rec(rec, 0, cplx(1.0), 0);
  return FourierField(M, std::move(out));
}

double max_diff(const FourierField& a, const FourierField& b) {
  double m = 0.0;
  for (int n = -a.radius(); n <= a.radius(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

SimulationConfig random_cfg(int p, int M, double T, double dt, std::uint64_t seed) {
  SimulationConfig c;
  c.p = p;
  c.M = M;
  c.T = T;
  c.dt = dt;
  c.seed = seed;
  c.s = 1.5;
  c.N = std::max(1, M / 4);
  c.record_every = 1000;
  return c;
}

}  // namespace

TEST(Sizing, SmoothSizes) {
  EXPECT_EQ(smooth_size(1), 1);
  EXPECT_EQ(smooth_size(7), 8);
  EXPECT_EQ(smooth_size(257), 270);
  EXPECT_EQ(dealiased_gridsize(1, 64), 270);
  EXPECT_EQ(dealiased_gridsize(2, 64), 400);
}

TEST(Config, Validation) {
  SimulationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gridsize = 2 * 2 * c.M;
  EXPECT_THROW(c.validate(), SizingError);
  c = SimulationConfig{};
  c.dt = 0.1;
  c.M = 32;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimulationConfig{};
  c.s = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimulationConfig{};
  c.record_every = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimulationConfig{};
  c.ic.kind = InitialCondition::Kind::PlaneWave;
  c.ic.k = c.M + 1;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  SimulationConfig c;
  c.p = 2;
  c.M = 12;
  c.ic.kind = InitialCondition::Kind::PlaneWave;
  c.ic.k = -3;
  c.ic.amplitude = {0.5, -0.25};
  auto d = SimulationConfig::from_json(c.to_json());
  EXPECT_EQ(d.to_json(), c.to_json());
  EXPECT_THROW(SimulationConfig::from_json({{"ic", {{"kind", "gaussian"}}}}), ConfigError);
}

TEST(InitialData, RandomIsNormalizedAndSeeded) {
  auto c = random_cfg(1, 16, 1.0, 1e-3, 3);
  c.ic.hs_norm = 2.5;
  auto q = initial_condition(c);
  EXPECT_NEAR(sobolev_norm(q, c.s), 2.5, 1e-12);
  EXPECT_EQ(max_diff(q, initial_condition(c)), 0.0);
  c.seed = 4;
  EXPECT_GT(max_diff(q, initial_condition(c)), 0.0);
  // |q_n| proportional to <n>^{-(s + 0.6)}
  const double r = std::abs(q[3]) / std::abs(q[1]);
  EXPECT_NEAR(r, std::pow(4.0 / 2.0, -(c.s + 0.6)), 1e-12);
}

TEST(Nonlinearity, PlaneWave) {
  const cplx a(0.7, -0.4);
  for (int p : {1, 2, 3}) {
    auto q = FourierField::delta(5, 2, a);
    auto nl = nonlinearity(q, p, dealiased_gridsize(p, 5));
    EXPECT_LE(max_diff(nl, FourierField::delta(5, 2, std::pow(std::norm(a), p) * a)), 1e-15);
  }
}

TEST(Nonlinearity, ZeroField) {
  auto nl = nonlinearity(FourierField(4), 1, dealiased_gridsize(1, 4));
  EXPECT_EQ(max_diff(nl, FourierField(4)), 0.0);
}

TEST(Nonlinearity, MatchesDirectConvolution) {
  const int M = 1;
  auto q = FourierField::delta(M, 0, 1.0) + FourierField::delta(M, 1, 1.0);
  EXPECT_LE(max_diff(nonlinearity(q, 1, dealiased_gridsize(1, M)), convolution_oracle(q, 1)), 1e-14);
  for (int p : {1, 2}) {
    auto r = random_field(3, 10 + p, 0.5);
    EXPECT_LE(max_diff(nonlinearity(r, p, dealiased_gridsize(p, 3)), convolution_oracle(r, p)), 1e-13);
    EXPECT_THROW(nonlinearity(r, p, 2 * (p + 1) * 3), SizingError);
  }
}

TEST(PhysicalHamiltonian, Examples) {
  EXPECT_NEAR(hamiltonian_physical(FourierField::delta(3, 1, 1.0), 1, dealiased_gridsize(1, 3)), 1.5 * M_PI, 1e-14);
  EXPECT_EQ(hamiltonian_physical(FourierField(3), 1, dealiased_gridsize(1, 3)), 0.0);
}

TEST(PhysicalHamiltonian, GridRefinementInvariant) {
  for (int p : {1, 2, 3}) {
    auto q = random_field(6, 20 + p, 0.4);
    const int g0 = 2 * (p + 1) * 6 + 1;
    const double h0 = hamiltonian_physical(q, p, g0);
    for (int g : {g0 + 1, 2 * g0, 3 * g0 + 7}) EXPECT_LE(std::abs(hamiltonian_physical(q, p, g) - h0), 1e-12 * h0);
  }
}

TEST(Step, PlaneWavePhase) {
  const cplx a = std::polar(0.8, 0.3);
  for (int p : {1, 2, 3}) {
    SimulationConfig c;
    c.p = p;
    c.M = 4;
    c.dt = 1e-3;
    NlsStepper st(p, c.M, c.resolved_gridsize());
    auto q = FourierField::delta(c.M, 2, a);
    for (int k = 0; k < 1000; ++k) q = st.step(q, 1e-3);
    const cplx exact = a * std::exp(cplx(0.0, 4.0 + std::pow(std::norm(a), p)));
    EXPECT_LE(std::abs(q[2] - exact), 1e-8) << "p " << p;
  }
}

TEST(Step, ZeroStaysZero) {
  SimulationConfig c;
  auto q = step(FourierField(c.M), 1e-3, c);
  EXPECT_EQ(max_diff(q, FourierField(c.M)), 0.0);
}

TEST(Step, FourthOrderSelfRefinement) {
  auto c = random_cfg(1, 16, 1.0, 0.02, 5);
  c.ic.hs_norm = 3.0;
  auto q0 = initial_condition(c);
  NlsStepper st(1, c.M, c.resolved_gridsize());
  auto integrate = [&](double dt) {
    auto q = q0;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < n; ++k) q = st.step(q, dt);
    return q;
  };
  const double dt = 0.02;
  auto ref = integrate(dt / 16);
  const double e1 = std::sqrt(mass(integrate(dt) - ref)), e2 = std::sqrt(mass(integrate(dt / 2) - ref));
  const double order = std::log2(e1 / e2);
  std::printf("nls self-refinement: e(dt)=%.3e e(dt/2)=%.3e order=%.2f\n", e1, e2, order);
  EXPECT_GE(order, 3.5);
}

TEST(Run, PlaneWaveHsConstant) {
  SimulationConfig c;
  c.M = 8;
  c.T = 2.0;
  c.record_every = 100;
  c.ic.kind = InitialCondition::Kind::PlaneWave;
  c.ic.k = 3;
  c.ic.amplitude = 0.9;
  auto ts = run(c);
  ASSERT_GE(ts.rows.size(), 10u);
  for (const auto& r : ts.rows) EXPECT_NEAR(r.hs_norm, ts.rows.front().hs_norm, 1e-8);
  for (std::size_t i = 1; i < ts.rows.size(); ++i) EXPECT_GT(ts.rows[i].t, ts.rows[i - 1].t);
  EXPECT_DOUBLE_EQ(ts.rows.back().t, 2.0);
}

// Smooth data (normalized in H^3). With H^{1.5}-normalized data the method's
// truncation error at dt = 1e-3 is ~1e-5 in the Hamiltonian.
TEST(Run, ConservationAcrossPowersAndSeeds) {
  for (int p : {1, 2, 3})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto c = random_cfg(p, 64, 10.0, 1e-3, seed);
      c.s = 3.0;
      c.record_every = 500;
      auto ts = run(c);
      ASSERT_FALSE(ts.aborted);
      const auto& r0 = ts.rows.front();
      double dm = 0.0, dh = 0.0;
      for (const auto& r : ts.rows) {
        dm = std::max(dm, std::abs(r.mass - r0.mass) / r0.mass);
        dh = std::max(dh, std::abs(r.hamiltonian - r0.hamiltonian) / r0.hamiltonian);
        EXPECT_LE(std::abs(r.momentum - r0.momentum), 1e-10 * r0.mass);
      }
      EXPECT_LE(dm, 1e-10) << "p " << p << " seed " << seed;
      EXPECT_LE(dh, 1e-8) << "p " << p << " seed " << seed;
    }
}

TEST(Run, TruncationConsistency) {
  // Analytic data on |n| <= 6 embedded in M = 32 and M = 64.
  std::vector<cplx> c0(13);
  for (int n = -6; n <= 6; ++n) c0[static_cast<std::size_t>(n + 6)] = std::polar(0.5 * std::exp(-std::abs(n)), 0.37 * n * n);
  const FourierField base(6, std::move(c0));
  std::vector<std::vector<double>> traj;
  for (int M : {32, 64}) {
    SimulationConfig c;
    c.M = M;
    c.T = 1.0;
    c.dt = 1e-3;
    c.record_every = 100;
    NlsStepper st(1, M, c.resolved_gridsize());
    auto q = base.resized(M);
    std::vector<double> hs{sobolev_norm(q, c.s)};
    for (int k = 1; k <= 1000; ++k) {
      q = st.step(q, c.dt);
      if (k % 100 == 0) hs.push_back(sobolev_norm(q, c.s));
    }
    traj.push_back(hs);
  }
  for (std::size_t i = 0; i < traj[0].size(); ++i)
    EXPECT_LE(std::abs(traj[0][i] - traj[1][i]), 1e-6 * traj[1][i]);
}

TEST(Run, HHCancellationOnLowFrequencyData) {
  const int M = 5;
  auto red = reduce(cubic_start_hamiltonian(M, 2.0), [] {
               ReductionConfig c;
               c.K = 2.0;
               c.steps = 1;
               c.taylor_order = 2;
               c.max_degree = 6;
               return c;
             }(), 2.0).reduced;
  auto c = random_cfg(1, M, 0.2, 1e-3, 7);
  c.N = M;
  c.record_every = 50;
  auto ts = run(c, &red);
  ASSERT_GE(ts.rows.size(), 4u);
  for (const auto& r : ts.rows) {
    ASSERT_TRUE(r.hh1 && r.hh2 && r.hh3 && r.modified_energy);
    const double scale = std::max({std::abs(*r.hh1), std::abs(*r.hh2), std::abs(*r.modified_energy)});
    EXPECT_GT(std::abs(*r.hh1), 0.0);
    EXPECT_LE(std::abs(*r.hh1 + *r.hh2), 1e-10 * scale);
    EXPECT_LE(std::abs(*r.hh3), 1e-10 * scale);
  }
}

TEST(Run, ReducedRadiusGuard) {
  ReducedHamiltonian red;
  red.quadratic = make_quadratic(3);
  auto c = random_cfg(1, 8, 0.1, 1e-3, 1);
  EXPECT_THROW(run(c, &red), ConfigError);
}

TEST(Run, BlowUpAbortsWithPartialSeries) {
  SimulationConfig c;
  c.M = 2;
  c.dt = 0.1;
  c.T = 5.0;
  c.record_every = 1;
  c.ic.hs_norm = 1e3;
  auto ts = run(c);
  EXPECT_TRUE(ts.aborted);
  EXPECT_FALSE(ts.abort_reason.empty());
  EXPECT_GE(ts.rows.size(), 1u);
}

TEST(TimeSeriesCsv, RoundTripAndHeader) {
  TimeSeries ts;
  TimeSeriesRow a;
  a.t = 0.1;
  a.mass = 1.0 / 3.0;
  a.hs_norm = 2.0;
  TimeSeriesRow b = a;
  b.t = 0.2;
  b.hh1 = -1e-300;
  b.modified_energy = 0.125;
  ts.rows = {a, b};
  std::stringstream ss;
  ts.write_csv(ss);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,mass,momentum,hamiltonian,hs_norm,d_h1_norm,modified_energy,hh1,hh2,hh3");
  EXPECT_NE(text.find("0.1,0.3333333333333333,0,0,2,0,,,,\n"), std::string::npos);
  auto back = TimeSeries::read_csv(ss);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].mass, a.mass);
  EXPECT_FALSE(back.rows[0].hh1.has_value());
  EXPECT_EQ(*back.rows[1].hh1, -1e-300);
  std::stringstream bad("t,mass\n");
  EXPECT_THROW(TimeSeries::read_csv(bad), std::invalid_argument);
}

TEST(GrowthFit, ConstantSeries) {
  TimeSeries ts;
  for (int i = 0; i < 12; ++i) ts.rows.push_back({.t = double(i), .hs_norm = 3.0});
  auto g = growth_fit(ts);
  EXPECT_EQ(g.alpha, 0.0);
  EXPECT_FALSE(g.r2.has_value());
}

TEST(GrowthFit, ExactPowerLaw) {
  TimeSeries ts;
  for (int i = 0; i < 20; ++i) ts.rows.push_back({.t = 0.5 * i, .hs_norm = std::pow(1.0 + 0.5 * i, 0.3)});
  auto g = growth_fit(ts);
  EXPECT_NEAR(g.alpha, 0.3, 1e-6);
  ASSERT_TRUE(g.r2.has_value());
  EXPECT_NEAR(*g.r2, 1.0, 1e-12);
}

TEST(GrowthFit, TooFewRows) {
  TimeSeries ts;
  ts.rows.resize(9, TimeSeriesRow{.hs_norm = 1.0});
  EXPECT_THROW(growth_fit(ts), std::invalid_argument);
}

TEST(DsScan, AllEqualTuplesGiveZero) {
  for (int v : {0, 3, -7}) {
    const std::vector<int> t(6, v);
    EXPECT_EQ(ds_ratio(t, 2.0, 1.0), 0.0);
  }
}

// Exhaustive degree-4 baseline over range 8, s = 2, K = 1.
constexpr double kDsBaseline = 128.0;

TEST(DsScan, ExhaustiveDegreeFourBaseline) {
  auto r = ds_lemma_exhaustive(2.0, 1.0, 8);
  std::printf("degree-4 baseline %.17g at (%d,%d,%d,%d)\n", r.max_ratio, r.argmax[0], r.argmax[1], r.argmax[2],
              r.argmax[3]);
  EXPECT_TRUE(std::isfinite(r.max_ratio));
  EXPECT_DOUBLE_EQ(r.max_ratio, kDsBaseline);
  EXPECT_DOUBLE_EQ(ds_lemma_exhaustive(2.0, 1.0, 8).max_ratio, r.max_ratio);
  EXPECT_DOUBLE_EQ(ds_ratio(r.argmax, 2.0, 1.0), r.max_ratio);
}

TEST(DsScan, ResonantDegreeFourVanishes) {
  // D = 0 at degree 4 forces {n1, n3} = {n2, n4}, hence D_s = 0.
  EXPECT_EQ(ds_lemma_exhaustive(2.0, 1.0, 8, 4, true).max_ratio, 0.0);
}

TEST(DsScan, RandomScanDeterministicAndFinite) {
  auto a = ds_lemma_scan(2.0, 1.0, 16, 2000, 9), b = ds_lemma_scan(2.0, 1.0, 16, 2000, 9);
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  EXPECT_EQ(a.argmax, b.argmax);
  EXPECT_EQ(a.evaluated, 2000);
  EXPECT_TRUE(std::isfinite(a.max_ratio));
  EXPECT_THROW(ds_lemma_scan(2.0, 1.0, 16, 0, 9), std::invalid_argument);
}

TEST(DsScan, ResonantSamplerHitsResonantSet) {
  const double K = 3.0;
  auto r = ds_lemma_scan(2.0, K, 32, 500, 4, true);
  EXPECT_EQ(r.evaluated, 500);
  ASSERT_FALSE(r.argmax.empty());
  EXPECT_LT(std::llabs(D_value(r.argmax)), K);
  long long sum = 0;
  for (std::size_t j = 0; j < r.argmax.size(); ++j) sum += (j % 2 == 0 ? 1 : -1) * r.argmax[j];
  EXPECT_EQ(sum, 0);
}
