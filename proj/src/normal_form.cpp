#include "nlsnf/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsnf/errors.hpp"
#include "nlsnf/size_norm.hpp"

namespace nlsnf {

void ReductionConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("reduction config: " + m); };
  if (!(K > 0) || !std::isfinite(K)) fail("K must be a positive finite number");
  if (taylor_order < 1 || taylor_order > 12) fail("taylor_order must lie in [1, 12]");
  if (max_degree < 4 || max_degree > kMaxDegree || max_degree % 2 != 0)
    fail("max_degree must be even and in [4, " + std::to_string(kMaxDegree) + "]");
  if (steps < 0) fail("steps must be >= 0");
  if (!(remainder_threshold >= 0)) fail("remainder_threshold must be >= 0");
  if (!(C1 > 0) || !(C2 > 0)) fail("C1 and C2 must be positive");
  if (threads < 0) fail("threads must be >= 0");
}

nlohmann::json ReductionConfig::to_json() const {
  return {{"K", K},
          {"taylor_order", taylor_order},
          {"max_degree", max_degree},
          {"steps", steps},
          {"remainder_threshold", remainder_threshold},
          {"C1", C1},
          {"C2", C2},
          {"threads", threads}};
}

int default_max_degree(int p) { return p == 1 ? 8 : std::min(2 * p + 6, kMaxDegree); }

namespace {

void add_record(std::vector<OverflowRecord>& recs, const OverflowRecord& r) {
  for (auto& e : recs)
    if (e.degree == r.degree) {
      e.mass_bound += r.mass_bound;
      e.norm_bound += r.norm_bound;
      return;
    }
  recs.push_back(r);
  std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.degree < b.degree; });
}

// Continues a series whose last materialized term is terms.back() at index k0.
void continue_series(LieSeriesResult& res, const HomogeneousHamiltonian& f, const LieSeriesOptions& opt, int k0) {
  BracketOptions bo;
  bo.max_degree = opt.max_degree;
  bo.threads = opt.threads;
  HomogeneousHamiltonian cur = res.terms.back();
  bool materialized = true;
  int deg = cur.degree();
  double mass = cur.l1_mass();
  for (int k = k0 + 1; k <= opt.order; ++k) {
    if (materialized && cur.empty()) break;
    if (!materialized && mass == 0.0) break;
    const int next_deg = deg + f.degree() - 2;
    const double inv_k = 1.0 / k;
    if (materialized && next_deg <= opt.max_degree) {
      auto r = poisson_bracket(cur, f, bo);
      cur = r.value.scaled(inv_k);
      res.pruned_mass += r.pruned_mass * inv_k;
      res.terms.push_back(cur);
      mass = cur.l1_mass();
    } else if (materialized && opt.materialize_overflow && next_deg <= kMaxDegree) {
      auto r = poisson_bracket(cur, f, bo);
      cur = (r.overflow ? *r.overflow : r.value).scaled(inv_k);
      res.pruned_mass += r.pruned_mass * inv_k;
      res.overflow.push_back(cur);
      mass = cur.l1_mass();
      add_record(res.overflow_records, {next_deg, mass, std::pow(opt.C1, next_deg) * mass});
    } else {
      mass = (materialized ? bracket_mass_bound(cur, f) : bracket_mass_bound(deg, mass, f)) * inv_k;
      materialized = false;
      cur = HomogeneousHamiltonian();
      add_record(res.overflow_records, {next_deg, mass, std::pow(opt.C1, next_deg) * mass});
    }
    deg = next_deg;
  }
}

}  // namespace

LieSeriesResult lie_series(const HomogeneousHamiltonian& g, const HomogeneousHamiltonian& f,
                           const LieSeriesOptions& opt) {
  if (opt.order < 0) throw std::invalid_argument("lie_series: order must be >= 0");
  LieSeriesResult res;
  res.terms.push_back(g);
  if (opt.order == 0 || f.empty()) return res;
  continue_series(res, f, opt, 0);
  return res;
}

LieSeriesResult lie_series(const QuadraticPart& q, const HomogeneousHamiltonian& f, const LieSeriesOptions& opt) {
  if (opt.order < 0) throw std::invalid_argument("lie_series: order must be >= 0");
  LieSeriesResult res;
  res.terms.push_back(HomogeneousHamiltonian(f.degree(), std::max(f.radius(), q.radius)));
  if (opt.order == 0 || f.empty()) return res;
  res.terms.push_back(bracket(q, f));
  continue_series(res, f, opt, 1);
  return res;
}

// ---------------------------------------------------------------------------

nlohmann::json StepReport::to_json() const {
  return {{"step", step},
          {"degree_min", degree_min},
          {"nonres_norm_before", nonres_norm_before},
          {"nonres_norm_upper", nonres_norm_upper},
          {"res_norm_upper", res_norm_upper},
          {"remainder_norm_upper", remainder_norm_upper},
          {"overflow_mass", overflow_mass},
          {"pruned_mass", pruned_mass},
          {"transport_mass", transport_mass},
          {"cancellation_residual", cancellation_residual},
          {"min_nonres_degree_after", min_nonres_degree_after}};
}

nlohmann::json ReductionReport::to_json() const {
  nlohmann::json s = nlohmann::json::array();
  for (const auto& r : steps) s.push_back(r.to_json());
  return {{"steps", s}, {"converged", converged}, {"residual_nonres_norm", residual_nonres_norm}};
}

QuadraticPart ReducedHamiltonian::weights_for(const FourierField& q) const {
  QuadraticPart w = quadratic;
  if (mu_shift_factor != 0.0) {
    const double shift = mu_shift_factor * mass(q);
    for (auto& v : w.weights) v += shift;
  }
  return w;
}

double ReducedHamiltonian::modified_energy(const FourierField& q, const MultiplierSpec& spec) const {
  const auto w = weights_for(q);
  double e = 0.0;
  for (int n = -w.radius; n <= w.radius; ++n) e += std::pow(m_value(spec, n), 2) * w(n) * std::norm(q[n]);
  const FourierField p = apply_multiplier(q.resized(radius()), spec);
  for (const auto& h : resonant) e += evaluate(h, p);
  return e;
}

nlohmann::json ReducedHamiltonian::to_json() const {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& h : resonant) pieces.push_back({{"tag", to_string(PieceTag::Resonant)}, {"tensor", h.to_json()}});
  for (const auto& h : remainder) pieces.push_back({{"tag", to_string(PieceTag::Remainder)}, {"tensor", h.to_json()}});
  nlohmann::json of = nlohmann::json::array();
  for (const auto& o : overflow)
    of.push_back({{"degree", o.degree}, {"mass_bound", o.mass_bound}, {"norm_bound", o.norm_bound}});
  return {{"quadratic", {{"M", quadratic.radius}, {"weights", quadratic.weights}}},
          {"mu_shift_factor", mu_shift_factor},
          {"K", K},
          {"pieces", pieces},
          {"overflow", of}};
}

ReducedHamiltonian ReducedHamiltonian::from_json(const nlohmann::json& j) {
  ReducedHamiltonian r;
  const auto& q = j.at("quadratic");
  r.quadratic = make_quadratic(q.at("M").get<int>(), q.at("weights").get<std::vector<double>>());
  r.mu_shift_factor = j.value("mu_shift_factor", 0.0);
  r.K = j.value("K", 0.0);
  for (const auto& p : j.at("pieces")) {
    const auto tag = piece_tag_from_string(p.at("tag").get<std::string>());
    auto h = HomogeneousHamiltonian::from_json(p.at("tensor"));
    if (tag == PieceTag::Resonant)
      r.resonant.push_back(std::move(h));
    else if (tag == PieceTag::Remainder)
      r.remainder.push_back(std::move(h));
    else
      throw std::invalid_argument("reduced Hamiltonian may not contain nonresonant pieces");
  }
  if (j.contains("overflow"))
    for (const auto& o : j.at("overflow"))
      r.overflow.push_back(
          {o.at("degree").get<int>(), o.at("mass_bound").get<double>(), o.at("norm_bound").get<double>()});
  return r;
}

// ---------------------------------------------------------------------------

HamiltonianSum retag(const QuadraticPart& q, const std::vector<HomogeneousHamiltonian>& pieces, double K,
                     double remainder_threshold, double C1, double C2) {
  std::map<int, HomogeneousHamiltonian> by_degree;
  for (const auto& p : pieces) {
    if (p.empty()) continue;
    auto it = by_degree.find(p.degree());
    if (it == by_degree.end())
      by_degree.emplace(p.degree(), p);
    else
      it->second = it->second + p;
  }
  HamiltonianSum out;
  out.quadratic = q;
  out.K = K;
  for (auto& [deg, h] : by_degree) {
    auto [res, non] = split_resonant(h, K);
    for (auto& [part, tag] : {std::pair{&res, PieceTag::Resonant}, std::pair{&non, PieceTag::Nonresonant}}) {
      if (part->empty()) continue;
      const bool small = norm_upper_bound(*part, C1, C2) < remainder_threshold;
      out.pieces.push_back({std::move(*part), small ? PieceTag::Remainder : tag});
    }
  }
  return out;
}

namespace {

double summed_norm(const HamiltonianSum& h, PieceTag tag, double C1, double C2) {
  double s = 0.0;
  for (const auto& p : h.pieces)
    if (p.tag == tag) s += norm_upper_bound(p.tensor, C1, C2);
  return s;
}

int min_degree(const HamiltonianSum& h, PieceTag tag) {
  int d = 0;
  for (const auto& p : h.pieces)
    if (p.tag == tag && !p.tensor.empty() && (d == 0 || p.tensor.degree() < d)) d = p.tensor.degree();
  return d;
}

}  // namespace

StepResult reduce_step(const HamiltonianSum& h, const ReductionConfig& cfg) {
  cfg.validate();
  StepResult out;
  const int d0 = min_degree(h, PieceTag::Nonresonant);
  if (d0 == 0) {
    out.hamiltonian = h;
    out.report.res_norm_upper = summed_norm(h, PieceTag::Resonant, cfg.C1, cfg.C2);
    out.report.remainder_norm_upper = summed_norm(h, PieceTag::Remainder, cfg.C1, cfg.C2);
    return out;
  }
  const int R = h.radius();
  StepReport& rep = out.report;
  rep.degree_min = d0;
  rep.nonres_norm_before = summed_norm(h, PieceTag::Nonresonant, cfg.C1, cfg.C2);

  HomogeneousHamiltonian target(d0, R);
  std::map<int, HomogeneousHamiltonian> active;  // non-remainder content by degree
  std::vector<HomogeneousHamiltonian> carried;
  for (const auto& p : h.pieces) {
    if (p.tensor.empty()) continue;
    if (p.tag == PieceTag::Remainder) {
      carried.push_back(p.tensor);
      continue;
    }
    if (p.tag == PieceTag::Nonresonant && p.tensor.degree() == d0) target = target + p.tensor;
    auto it = active.find(p.tensor.degree());
    if (it == active.end())
      active.emplace(p.tensor.degree(), p.tensor);
    else
      it->second = it->second + p.tensor;
  }
  const HomogeneousHamiltonian F = homological_solve(h.quadratic, target);

  LieSeriesOptions lo;
  lo.order = cfg.taylor_order;
  lo.max_degree = cfg.max_degree;
  lo.threads = cfg.threads;
  lo.C1 = cfg.C1;

  std::vector<HomogeneousHamiltonian> produced;
  auto absorb = [&](LieSeriesResult&& s) {
    for (auto& t : s.terms)
      if (!t.empty()) produced.push_back(std::move(t));
    for (const auto& r : s.overflow_records) {
      add_record(out.overflow, r);
      rep.overflow_mass += r.mass_bound;
    }
    rep.pruned_mass += s.pruned_mass;
  };
  absorb(lie_series(h.quadratic, F, lo));
  for (const auto& [deg, g] : active) absorb(lie_series(g, F, lo));

  // Remainder pieces are carried unchanged; their Lie corrections are bounded.
  for (const auto& c : carried) {
    double mass = bracket_mass_bound(c, F);
    int deg = c.degree() + F.degree() - 2;
    for (int k = 1; k <= cfg.taylor_order && mass > 0; ++k) {
      if (k > 1) {
        mass = bracket_mass_bound(deg, mass, F) / k;
        deg += F.degree() - 2;
      }
      rep.transport_mass += mass;
      add_record(out.overflow, {deg, mass, std::pow(cfg.C1, deg) * mass});
    }
  }

  HamiltonianSum next = retag(h.quadratic, produced, cfg.K, cfg.remainder_threshold, cfg.C1, cfg.C2);
  std::map<int, HomogeneousHamiltonian> rem;
  for (auto& p : next.pieces)
    if (p.tag == PieceTag::Remainder) rem.emplace(p.tensor.degree(), HomogeneousHamiltonian(p.tensor.degree(), R));
  for (const auto& c : carried) rem.emplace(c.degree(), HomogeneousHamiltonian(c.degree(), R));
  for (auto& p : next.pieces)
    if (p.tag == PieceTag::Remainder) rem[p.tensor.degree()] = rem[p.tensor.degree()] + p.tensor;
  for (const auto& c : carried) rem[c.degree()] = rem[c.degree()] + c;
  std::erase_if(next.pieces, [](const TaggedPiece& p) { return p.tag == PieceTag::Remainder; });
  for (auto& [deg, t] : rem)
    if (!t.empty()) next.pieces.push_back({std::move(t), PieceTag::Remainder});

  // Leftover weight on the eliminated classes.
  double left = 0.0;
  for (const auto& p : next.pieces)
    if (p.tensor.degree() == d0)
      for (const auto& t : target.terms()) left = std::max(left, std::abs(p.tensor.coefficient(t.key)));
  rep.cancellation_residual = target.max_abs() > 0 ? left / target.max_abs() : 0.0;

  rep.nonres_norm_upper = summed_norm(next, PieceTag::Nonresonant, cfg.C1, cfg.C2);
  rep.res_norm_upper = summed_norm(next, PieceTag::Resonant, cfg.C1, cfg.C2);
  rep.remainder_norm_upper = summed_norm(next, PieceTag::Remainder, cfg.C1, cfg.C2);
  for (const auto& o : out.overflow) rep.remainder_norm_upper += o.norm_bound;
  rep.min_nonres_degree_after = min_degree(next, PieceTag::Nonresonant);
  out.hamiltonian = std::move(next);
  return out;
}

ReductionResult reduce(const HamiltonianSum& h, const ReductionConfig& cfg, double mu_shift_factor) {
  cfg.validate();
  ReductionResult res;
  HamiltonianSum cur = h;
  std::vector<OverflowRecord> overflow;
  for (int s = 1; s <= cfg.steps; ++s) {
    if (min_degree(cur, PieceTag::Nonresonant) == 0) break;
    auto step = reduce_step(cur, cfg);
    step.report.step = s;
    double prior = 0.0;
    for (const auto& o : overflow) prior += o.norm_bound;
    step.report.remainder_norm_upper += prior;
    for (const auto& o : step.overflow) add_record(overflow, o);
    res.report.steps.push_back(step.report);
    cur = std::move(step.hamiltonian);
  }
  ReducedHamiltonian& out = res.reduced;
  out.quadratic = cur.quadratic;
  out.mu_shift_factor = mu_shift_factor;
  out.K = cfg.K;
  out.overflow = overflow;
  for (auto& p : cur.pieces) {
    if (p.tensor.empty()) continue;
    switch (p.tag) {
      case PieceTag::Resonant: out.resonant.push_back(std::move(p.tensor)); break;
      case PieceTag::Remainder: out.remainder.push_back(std::move(p.tensor)); break;
      case PieceTag::Nonresonant:
        res.report.converged = false;
        res.report.residual_nonres_norm += norm_upper_bound(p.tensor, cfg.C1, cfg.C2);
        out.remainder.push_back(std::move(p.tensor));
        break;
    }
  }
  return res;
}

HamiltonianSum nls_hamiltonian(int p, int radius, double K) {
  HamiltonianSum h;
  h.quadratic = make_quadratic(radius);
  h.K = K;
  auto [res, non] = split_resonant(make_nls_nonlinearity(p, radius), K);
  if (!res.empty()) h.pieces.push_back({std::move(res), PieceTag::Resonant});
  if (!non.empty()) h.pieces.push_back({std::move(non), PieceTag::Nonresonant});
  return h;
}

HamiltonianSum cubic_start_hamiltonian(int radius, double K) {
  HamiltonianSum h;
  h.quadratic = make_quadratic(radius);
  h.K = K;
  TensorBuilder r2(4, radius);
  for (int n = -radius; n <= radius; ++n) {
    const int t[4] = {n, n, n, n};
    r2.add_tuple(t, -1.0);
  }
  h.pieces.push_back({std::move(r2).build(), PieceTag::Resonant});
  auto [low, high] = split_resonant(split_resonant(make_nls_nonlinearity(1, radius), 0.0).second, K);
  if (!low.empty()) h.pieces.push_back({std::move(low), PieceTag::Resonant});
  if (!high.empty()) h.pieces.push_back({std::move(high), PieceTag::Nonresonant});
  return h;
}

}  // namespace nlsnf
