#include "nlsnf/cubic_explicit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "nlsnf/errors.hpp"
#include "nlsnf/index_tuple.hpp"
#include "nlsnf/normal_form.hpp"

namespace nlsnf {

void CubicContext::validate() const {
  if (M < 1) throw ConfigError("CubicContext: M must be >= 1");
  if (N < 1) throw ConfigError("CubicContext: N must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("CubicContext: beta must lie in (0, 1)");
  if (!(mu >= 0.0)) throw ConfigError("CubicContext: mu must be >= 0");
}

double CubicContext::K2() const { return std::pow(static_cast<double>(N), beta); }

long long D1_factored(std::span<const int> t) {
  if (t.size() != 4) throw std::invalid_argument("D1: expected a quadruple");
  return -2LL * (t[0] - t[1]) * (t[2] - t[1]);
}

long long D1_value(std::span<const int> t) {
  if (t.size() != 4) throw std::invalid_argument("D1: expected a quadruple");
  check_tuple(t);
  const long long d = D_value(t);
  if (d != D1_factored(t)) throw std::logic_error("D1: quadratic and factored forms disagree");
  return d;
}

long long D2_value(std::span<const int> t) {
  if (t.size() != 6) throw std::invalid_argument("D2: expected a sextuple");
  check_tuple(t);
  return D_value(t);
}

double R1_value(const FourierField& q) {
  const double m = mass(q);
  return 2.0 * m * m;
}

HomogeneousHamiltonian build_R1_tensor(const CubicContext& ctx) {
  TensorBuilder b(4, ctx.M);
  for (int a = -ctx.M; a <= ctx.M; ++a)
    for (int c = -ctx.M; c <= ctx.M; ++c) {
      const std::array<int, 4> t{a, a, c, c};
      b.add_tuple(t, 2.0);
    }
  return std::move(b).build();
}

HomogeneousHamiltonian build_R2(const CubicContext& ctx) {
  TensorBuilder b(4, ctx.M);
  for (int n = -ctx.M; n <= ctx.M; ++n) {
    const std::array<int, 4> t{n, n, n, n};
    b.add_tuple(t, -1.0);
  }
  return std::move(b).build();
}

namespace {

template <class Fn>
void for_each_quadruple(int M, Fn&& fn) {
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b)
      for (int c = -M; c <= M; ++c) {
        const int d = a - b + c;
        if (std::abs(d) > M) continue;
        fn(a, b, c, d);
      }
}

}  // namespace

HomogeneousHamiltonian build_F1(const CubicContext& ctx) {
  TensorBuilder b(4, ctx.M);
  for_each_quadruple(ctx.M, [&](int n1, int n2, int n3, int n4) {
    if (n2 == n1 || n2 == n3) return;
    const std::array<int, 4> t{n1, n2, n3, n4};
    b.add_tuple(t, 1.0 / static_cast<double>(D1_factored(t)));
  });
  return std::move(b).build();
}

HomogeneousHamiltonian build_F1_generator(const CubicContext& ctx) { return build_F1(ctx).scaled(cplx(0.0, -1.0)); }

HomogeneousHamiltonian build_cubic_nonresonant(const CubicContext& ctx) {
  return split_resonant(make_nls_nonlinearity(1, ctx.M), 0.0).second;
}

HomogeneousHamiltonian build_I0(const CubicContext& ctx) {
  TensorBuilder b(6, ctx.M);
  for_each_quadruple(ctx.M, [&](int n1, int n2, int n3, int n4) {
    if (n2 == n1 || n2 == n3) return;
    const std::array<int, 6> t{n1, n2, n3, n4, n4, n4};
    b.add_tuple(t, 1.0 / (static_cast<double>(n1 - n2) * (n3 - n2)));
  });
  return std::move(b).build();
}

HomogeneousHamiltonian resonant_part(const HomogeneousHamiltonian& h, double K) { return split_resonant(h, K).first; }

HomogeneousHamiltonian build_I1(const CubicContext& ctx) { return resonant_part(build_I0(ctx), ctx.K2()); }

HomogeneousHamiltonian build_I2(const CubicContext& ctx) {
  const int M = ctx.M;
  const double K = ctx.K2();
  TensorBuilder b(6, M);
  std::array<int, 6> t{};
  for (int n1 = -M; n1 <= M; ++n1)
    for (int n2 = -M; n2 <= M; ++n2) {
      if (n2 == n1) continue;
      for (int n3 = -M; n3 <= M; ++n3) {
        if (n2 == n3) continue;
        const double c = 1.0 / (static_cast<double>(n1 - n2) * (n3 - n2));
        for (int n4 = -M; n4 <= M; ++n4)
          for (int n5 = -M; n5 <= M; ++n5) {
            const int n6 = n1 - n2 + n3 - n4 + n5;
            if (std::abs(n6) > M || n5 == n4 || n5 == n6) continue;
            t = {n1, n2, n3, n4, n5, n6};
            if (static_cast<double>(std::llabs(D_value(t))) > K) continue;
            b.add_tuple(t, c);
          }
      }
    }
  return std::move(b).build();
}

nlohmann::json SubcaseScan::to_json() const {
  return {{"N", N},
          {"M", M},
          {"beta", beta},
          {"low_margin", low_margin},
          {"third_margin", third_margin},
          {"examined", examined},
          {"violations", violations},
          {"examples", examples}};
}

SubcaseScan subcase_scan(int N, int M, double beta) {
  SubcaseScan s;
  s.N = N;
  s.M = M;
  s.beta = beta;
  const double K = std::pow(static_cast<double>(N), beta);
  const int low = static_cast<int>(std::floor(s.low_margin * N));
  const double third = s.third_margin * std::sqrt(static_cast<double>(N));
  std::array<int, 6> t{}, mags{};
  for (int n1 = -low; n1 <= low; ++n1)
    for (int n2 = -low; n2 <= low; ++n2) {
      if (n2 == n1) continue;
      for (int n3 = -low; n3 <= low; ++n3) {
        if (n2 == n3) continue;
        // At most two magnitudes may exceed the third-largest cap, and one of
        // n4..n6 must exceed N; prune prefixes that already break this.
        const int big3 = (std::abs(n1) > third) + (std::abs(n2) > third) + (std::abs(n3) > third);
        if (big3 >= 2) continue;
        for (int n4 = -M; n4 <= M; ++n4) {
          if (big3 + (std::abs(n4) > third) > 2) continue;
          for (int n5 = -M; n5 <= M; ++n5) {
            const int n6 = n1 - n2 + n3 - n4 + n5;
            if (std::abs(n6) > M || n5 == n6) continue;
            t = {n1, n2, n3, n4, n5, n6};
            for (int j = 0; j < 6; ++j) mags[j] = std::abs(t[j]);
            std::nth_element(mags.begin(), mags.begin() + 3, mags.end());
            const int third_largest = *std::max_element(mags.begin(), mags.begin() + 4);
            if (third_largest > third) continue;
            if (*std::max_element(mags.begin() + 3, mags.end()) <= N) continue;
            if (static_cast<double>(std::llabs(D_value(t))) > K) continue;
            ++s.examined;
            if (n4 != n5) {
              ++s.violations;
              if (s.examples.size() < 8) s.examples.emplace_back(t.begin(), t.end());
            }
          }
        }
      }
    }
  return s;
}

bool CubicReport::all_pass() const {
  return std::all_of(identities.begin(), identities.end(), [](const IdentityCheck& c) { return c.pass; });
}

nlohmann::json CubicReport::to_json() const {
  auto list = [](const std::vector<IdentityCheck>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : v) a.push_back({{"name", c.name}, {"max_residual", c.max_residual}, {"pass", c.pass}});
    return a;
  };
  return {{"identities", list(identities)},
          {"sign_variants", list(sign_variants)},
          {"margins",
           {{"tolerance", kIdentityTolerance},
            {"K2", ctx.K2()},
            {"subcase_low_margin", SubcaseScan{}.low_margin},
            {"subcase_third_margin", SubcaseScan{}.third_margin}}},
          {"context", {{"M", ctx.M}, {"N", ctx.N}, {"beta", ctx.beta}, {"mu", ctx.mu}}},
          {"diagnostics", diagnostics},
          {"corrupted", corrupted},
          {"pass", all_pass()}};
}

namespace {

IdentityCheck check(std::string name, const HomogeneousHamiltonian& lhs, const HomogeneousHamiltonian& rhs) {
  IdentityCheck c;
  c.name = std::move(name);
  c.max_residual = (lhs - rhs).max_abs();
  c.pass = c.max_residual <= kIdentityTolerance;
  return c;
}

HomogeneousHamiltonian degree_sum(const HamiltonianSum& h, int degree) {
  HomogeneousHamiltonian acc(degree, h.radius());
  for (const auto& p : h.pieces)
    if (p.tensor.degree() == degree) acc = acc + p.tensor;
  return acc;
}

}  // namespace

CubicReport verify_cubic(const CubicContext& ctx, bool corrupt) {
  ctx.validate();
  if (ctx.M > 8) throw ConfigError("verify_cubic: M must be <= 8");
  CubicReport rep;
  rep.ctx = ctx;
  rep.corrupted = corrupt;
  const cplx I(0.0, 1.0);
  const double K2 = ctx.K2();

  auto R1 = build_R1_tensor(ctx);
  auto R2 = build_R2(ctx);
  auto F1 = build_F1(ctx);
  if (corrupt && !F1.empty()) {
    std::vector<Term> t(F1.terms().begin(), F1.terms().end());
    t.front().coef = -t.front().coef;
    F1 = HomogeneousHamiltonian::from_terms(4, ctx.M, std::move(t));
  }
  const auto Fgen = F1.scaled(-I);
  const auto Nnr = build_cubic_nonresonant(ctx);
  const auto I0 = build_I0(ctx), I1 = build_I1(ctx), I2 = build_I2(ctx);

  rep.identities.push_back(
      check("resonant quartic = R1 + R2", split_resonant(make_nls_nonlinearity(1, ctx.M), 0.0).first, R1 + R2));

  {
    IdentityCheck c{"R1 tensor = 2 mass^2", 0.0, false};
    for (int k = 0; k < 4; ++k) {
      std::vector<cplx> v(static_cast<std::size_t>(2 * ctx.M + 1));
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::polar(1.0 / (1.0 + j), 0.7 * (k + 1) * j);
      const FourierField q(ctx.M, std::move(v));
      const double f = R1_value(q);
      c.max_residual = std::max(c.max_residual, std::abs(evaluate(R1, q) - f) / f);
    }
    c.pass = c.max_residual <= kIdentityTolerance;
    rep.identities.push_back(c);
  }

  rep.identities.push_back(check("{R1, F1} = 0", bracket(R1, F1), HomogeneousHamiltonian(6, ctx.M)));
  rep.identities.push_back(check("{H0, F1/i} = -N", bracket(make_quadratic(ctx.M), Fgen), Nnr.scaled(-1.0)));
  rep.identities.push_back(check("F1/i = homological_solve(N)", Fgen, homological_solve(Nnr)));

  const auto R2F1 = bracket(R2, F1);
  rep.identities.push_back(check("{R2, F1} = 2i (I0 + conj I0)", R2F1, (I0 + I0.conj()).scaled(2.0 * I)));
  rep.identities.push_back(
      check("{R2, F1}^(r) = 2i (I1 + conj I1)", resonant_part(R2F1, K2), (I1 + I1.conj()).scaled(2.0 * I)));

  {
    IdentityCheck c{"reality symmetry of R1, R2, F1/i, {R2, F1/i}", 0.0, true};
    const auto R2Fgen = bracket(R2, Fgen);
    for (const HomogeneousHamiltonian* h : std::array<const HomogeneousHamiltonian*, 4>{&R1, &R2, &Fgen, &R2Fgen}) {
      const double r = (h->conj() - *h).max_abs();
      c.max_residual = std::max(c.max_residual, r);
    }
    c.pass = c.max_residual <= kIdentityTolerance;
    rep.identities.push_back(c);
  }

  {
    // Full first step on H0 + R2 + N with the whole D != 0 quartic as target.
    ReductionConfig cfg;
    cfg.K = 0.5;
    cfg.steps = 1;
    cfg.taylor_order = 2;
    cfg.max_degree = 6;
    cfg.remainder_threshold = 0.0;
    HamiltonianSum h;
    h.quadratic = make_quadratic(ctx.M);
    h.K = cfg.K;
    h.pieces.push_back({R2, PieceTag::Resonant});
    h.pieces.push_back({Nnr, PieceTag::Nonresonant});
    auto step = reduce_step(h, cfg);
    rep.identities.push_back(check("first step quartic = R2", degree_sum(step.hamiltonian, 4), R2));
    rep.identities.push_back(check("first step sextic = {R2, F} + 1/2 {N, F}", degree_sum(step.hamiltonian, 6),
                                   bracket(R2, Fgen) + bracket(Nnr, Fgen).scaled(0.5)));
  }

  rep.sign_variants.push_back(check("{R2, F1} = 2i (I0 - conj I0)", R2F1, (I0 - I0.conj()).scaled(2.0 * I)));
  const auto NF1r = resonant_part(bracket(Nnr, F1), K2).scaled(0.5);
  rep.sign_variants.push_back(check("1/2 {N, F1}^(r) = 2i (I2 - conj I2)", NF1r, (I2 - I2.conj()).scaled(2.0 * I)));

  rep.diagnostics = {{"class_counts",
                      {{"F1", F1.size()}, {"I0", I0.size()}, {"I1", I1.size()}, {"I2", I2.size()}}},
                     {"half_NF1_resonant_vs_2i_I2_plus_conj",
                      (NF1r - (I2 + I2.conj()).scaled(2.0 * I)).max_abs()}};
  return rep;
}

}  // namespace nlsnf
