#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <map>

#include "nlsnf/errors.hpp"
#include "nlsnf/normal_form.hpp"
#include "nlsnf/size_norm.hpp"
#include "support.hpp"

using namespace nlsnf;
using namespace nlsnf::testing;

namespace {

std::map<int, HomogeneousHamiltonian> by_degree(const HamiltonianSum& h) {
  std::map<int, HomogeneousHamiltonian> m;
  for (const auto& p : h.pieces) {
    auto it = m.find(p.tensor.degree());
    if (it == m.end())
      m.emplace(p.tensor.degree(), p.tensor);
    else
      it->second = it->second + p.tensor;
  }
  return m;
}

ReductionConfig cfg_with(double K, int steps, int order = 3, int max_degree = 8) {
  ReductionConfig c;
  c.K = K;
  c.steps = steps;
  c.taylor_order = order;
  c.max_degree = max_degree;
  c.remainder_threshold = 0.0;
  return c;
}

}  // namespace

TEST(LieSeries, OrderZeroIsIdentity) {
  auto g = random_tensor(4, 3, 10, 1);
  auto f = random_nonresonant(4, 3, 10, 2);
  LieSeriesOptions o;
  o.order = 0;
  auto s = lie_series(g, f, o);
  ASSERT_EQ(s.terms.size(), 1u);
  EXPECT_EQ((s.terms[0] - g).max_abs(), 0.0);
}

TEST(LieSeries, QuadraticFirstOrderCancels) {
  auto n = split_resonant(make_nls_nonlinearity(1, 4), 0.0).second;
  auto f = homological_solve(n);
  LieSeriesOptions o;
  o.order = 1;
  auto s = lie_series(make_quadratic(4), f, o);
  ASSERT_EQ(s.terms.size(), 2u);
  EXPECT_LE((s.terms[1] + n).max_abs(), 1e-14);
}

TEST(LieSeries, TermsAreNestedBrackets) {
  auto g = random_tensor(4, 3, 8, 3), f = random_nonresonant(4, 3, 8, 4);
  LieSeriesOptions o;
  o.order = 3;
  o.max_degree = 8;
  auto s = lie_series(g, f, o);
  ASSERT_EQ(s.terms.size(), 3u);  // degrees 4, 6, 8
  auto b1 = bracket(g, f), b2 = bracket(b1, f);
  EXPECT_LE((s.terms[1] - b1).max_abs(), 1e-14 * b1.max_abs());
  EXPECT_LE((s.terms[2] - b2.scaled(0.5)).max_abs(), 1e-14 * b2.max_abs());
  ASSERT_EQ(s.overflow_records.size(), 1u);
  EXPECT_EQ(s.overflow_records[0].degree, 10);
  // bounded overflow dominates the materialized one
  o.materialize_overflow = true;
  auto m = lie_series(g, f, o);
  ASSERT_EQ(m.overflow.size(), 1u);
  EXPECT_LE(m.overflow[0].l1_mass(), s.overflow_records[0].mass_bound * (1 + 1e-12));
  auto b3 = bracket(b2, f).scaled(1.0 / 6.0);
  EXPECT_LE((m.overflow[0] - b3).max_abs(), 1e-14 * b3.max_abs());
}

TEST(ReduceStep, NoNonresonantIsIdentity) {
  HamiltonianSum h;
  h.quadratic = make_quadratic(4);
  h.pieces.push_back({split_resonant(make_nls_nonlinearity(1, 4), 0.0).first, PieceTag::Resonant});
  auto r = reduce_step(h, cfg_with(2.0, 1));
  ASSERT_EQ(r.hamiltonian.pieces.size(), 1u);
  EXPECT_EQ((r.hamiltonian.pieces[0].tensor - h.pieces[0].tensor).max_abs(), 0.0);
  EXPECT_EQ(r.report.degree_min, 0);
}

TEST(ReduceStep, CubicFirstStepContent) {
  const int M = 6;
  auto h = cubic_start_hamiltonian(M);
  auto r = reduce_step(h, cfg_with(4.0, 1));
  auto deg = by_degree(r.hamiltonian);
  const auto& r2 = h.pieces[0].tensor;
  const auto& n = h.pieces[1].tensor;
  auto f = homological_solve(n);
  // quartic part: only R2 survives
  EXPECT_LE((deg.at(4) - r2).max_abs(), 1e-14);
  // sextic part: {R2, F} + 1/2 {N, F}
  auto expect6 = bracket(r2, f) + bracket(n, f).scaled(0.5);
  EXPECT_LE((deg.at(6) - expect6).max_abs(), 1e-13 * expect6.max_abs());
  EXPECT_LE(r.report.cancellation_residual, 1e-12);
  for (const auto& p : r.hamiltonian.pieces) {
    if (p.tag == PieceTag::Resonant)
      for (const auto& t : p.tensor.terms()) EXPECT_LE(std::abs(D_value(t.key, p.tensor.half())), 4);
    if (p.tag == PieceTag::Nonresonant)
      for (const auto& t : p.tensor.terms()) EXPECT_GT(std::abs(D_value(t.key, p.tensor.half())), 4);
  }
}

// Output pieces equal the Lie series of the input pieces degree by degree when
// nothing is thresholded away.
TEST(ReduceStep, ConservationOfContent) {
  const int M = 3;
  auto h = nls_hamiltonian(1, M, 2.0);
  auto cfg = cfg_with(2.0, 1, 3, 8);
  auto r = reduce_step(h, cfg);
  HomogeneousHamiltonian target(4, M);
  for (const auto& p : h.pieces)
    if (p.tag == PieceTag::Nonresonant) target = target + p.tensor;
  auto f = homological_solve(target);
  LieSeriesOptions o;
  o.order = 3;
  o.max_degree = 8;
  std::map<int, HomogeneousHamiltonian> expect;
  auto add = [&](const LieSeriesResult& s) {
    for (const auto& t : s.terms) {
      if (t.empty()) continue;
      auto it = expect.find(t.degree());
      if (it == expect.end())
        expect.emplace(t.degree(), t);
      else
        it->second = it->second + t;
    }
  };
  add(lie_series(h.quadratic, f, o));
  add(lie_series(make_nls_nonlinearity(1, M), f, o));
  auto got = by_degree(r.hamiltonian);
  for (const auto& [d, t] : expect) {
    const double diff = got.count(d) ? (got.at(d) - t).max_abs() : t.max_abs();
    EXPECT_LE(diff, 1e-13 * std::max(t.max_abs(), 1.0)) << "degree " << d;
  }
  EXPECT_GT(r.report.overflow_mass, 0.0);
}

TEST(Reduce, H0AloneUnchanged) {
  HamiltonianSum h;
  h.quadratic = make_quadratic(5);
  auto r = reduce(h, cfg_with(3.0, 3));
  EXPECT_TRUE(r.reduced.resonant.empty());
  EXPECT_TRUE(r.reduced.remainder.empty());
  EXPECT_TRUE(r.report.steps.empty());
  EXPECT_EQ(r.reduced.quadratic.weights, h.quadratic.weights);
}

TEST(Reduce, StepsZeroEchoesSplitInput) {
  auto h = nls_hamiltonian(1, 4, 3.0);
  auto r = reduce(h, cfg_with(3.0, 0));
  EXPECT_FALSE(r.report.converged);
  ASSERT_EQ(r.reduced.resonant.size(), 1u);
  EXPECT_EQ((r.reduced.resonant[0] - h.pieces[0].tensor).max_abs(), 0.0);
}

TEST(Reduce, CubicResonanceAudit) {
  auto r = reduce(nls_hamiltonian(1, 6, 4.0), cfg_with(4.0, 2, 3, 8));
  ASSERT_FALSE(r.reduced.resonant.empty());
  for (const auto& p : r.reduced.resonant)
    for (const auto& t : p.terms()) ASSERT_LE(std::abs(D_value(t.key, p.half())), 4);
  int prev = 0;
  for (const auto& s : r.report.steps) {
    EXPECT_GE(s.degree_min, prev);
    prev = s.degree_min;
    EXPECT_LE(s.cancellation_residual, 1e-12);
    EXPECT_GE(s.nonres_norm_upper, 0.0);
  }
}

TEST(Reduce, QuinticAuditAndMonotoneNorms) {
  // Small-data budgets: at C1 = C2 = 1 the first step grows the norm (68.7 -> 705.6).
  ReductionConfig c = cfg_with(4.0, 2, 2, 10);
  c.C1 = c.C2 = 0.5;
  auto r = reduce(nls_hamiltonian(2, 4, 4.0), c);
  for (const auto& p : r.reduced.resonant)
    for (const auto& t : p.terms()) ASSERT_LE(std::abs(D_value(t.key, p.half())), 4);
  ASSERT_FALSE(r.report.steps.empty());
  double prev = r.report.steps.front().nonres_norm_before;
  for (const auto& s : r.report.steps) {
    std::printf("quintic step %d: degree %d nonres %.6g -> %.6g\n", s.step, s.degree_min, s.nonres_norm_before,
                s.nonres_norm_upper);
    EXPECT_LE(s.nonres_norm_upper, prev * (1 + 1e-12));
    prev = s.nonres_norm_upper;
  }
}

TEST(Reduce, DegreeFloorGrows) {
  auto r = reduce(nls_hamiltonian(1, 4, 2.0), cfg_with(2.0, 3, 3, 8));
  int prev = 0;
  for (const auto& s : r.report.steps) {
    EXPECT_GE(s.degree_min, prev);
    if (s.min_nonres_degree_after) EXPECT_GT(s.min_nonres_degree_after, s.degree_min);
    prev = s.degree_min;
  }
}

TEST(Reduce, ThresholdMovesSmallPiecesToRemainder) {
  ReductionConfig c = cfg_with(2.0, 2);
  c.remainder_threshold = 1e300;
  auto r = reduce(nls_hamiltonian(1, 3, 2.0), c);
  EXPECT_TRUE(r.reduced.resonant.empty());
  EXPECT_FALSE(r.reduced.remainder.empty());
}

TEST(ReducedHamiltonianJson, RoundTrip) {
  auto r = reduce(nls_hamiltonian(1, 3, 2.0), cfg_with(2.0, 1), 2.0);
  auto back = ReducedHamiltonian::from_json(nlohmann::json::parse(r.reduced.to_json().dump()));
  EXPECT_EQ(back.mu_shift_factor, 2.0);
  ASSERT_EQ(back.resonant.size(), r.reduced.resonant.size());
  for (std::size_t i = 0; i < back.resonant.size(); ++i)
    EXPECT_EQ((back.resonant[i] - r.reduced.resonant[i]).max_abs(), 0.0);
  auto q = random_field(3, 4, 0.3);
  MultiplierSpec sp(2, 2.0);
  EXPECT_EQ(back.modified_energy(q, sp), r.reduced.modified_energy(q, sp));
}

TEST(ReductionConfig, Validation) {
  ReductionConfig c;
  EXPECT_NO_THROW(c.validate());
  c.taylor_order = 13;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.K = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.max_degree = 7;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(default_max_degree(1), 8);
  EXPECT_EQ(default_max_degree(2), 10);
}
