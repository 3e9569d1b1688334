#include "nlsnf/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nlsnf/errors.hpp"
#include "nlsnf/hh_terms.hpp"
#include "nlsnf/index_tuple.hpp"
#include "nlsnf/spectral_grid.hpp"

namespace nlsnf {

int smooth_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

int dealiased_gridsize(int p, int M) { return smooth_size(2 * (p + 1) * M + 1); }

int SimulationConfig::resolved_gridsize() const { return gridsize > 0 ? gridsize : dealiased_gridsize(p, M); }

void SimulationConfig::validate() const {
  if (p < 1) throw ConfigError("simulation: p must be >= 1");
  if (M < 0) throw ConfigError("simulation: M must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("simulation: dt must be positive");
  if (dt * M * M > 10.0) throw ConfigError("simulation: dt * M^2 must be <= 10");
  if (!(T > 0.0)) throw ConfigError("simulation: T must be positive");
  if (!(s > 1.0)) throw ConfigError("simulation: s must be > 1");
  if (N < 1) throw ConfigError("simulation: N must be >= 1");
  if (record_every < 1) throw ConfigError("simulation: record_every must be >= 1");
  if (ic.kind == InitialCondition::Kind::PlaneWave && std::abs(ic.k) > M)
    throw ConfigError("simulation: plane wave mode outside the lattice");
  if (ic.kind == InitialCondition::Kind::Random && !(ic.hs_norm > 0.0))
    throw ConfigError("simulation: ic.hs_norm must be positive");
  if (gridsize != 0 && gridsize < 2 * (p + 1) * M + 1)
    throw SizingError("simulation: gridsize " + std::to_string(gridsize) + " below the dealiasing bound " +
                      std::to_string(2 * (p + 1) * M + 1));
}

nlohmann::json SimulationConfig::to_json() const {
  nlohmann::json icj;
  if (ic.kind == InitialCondition::Kind::PlaneWave)
    icj = {{"kind", "plane_wave"}, {"k", ic.k}, {"amplitude", {ic.amplitude.real(), ic.amplitude.imag()}}};
  else
    icj = {{"kind", "random"}, {"hs_norm", ic.hs_norm}, {"decay_offset", ic.decay_offset}};
  return {{"p", p},   {"M", M}, {"gridsize", resolved_gridsize()}, {"dt", dt}, {"T", T},
          {"s", s},   {"N", N}, {"ic", icj},
          {"seed", seed}, {"record_every", record_every}};
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j) {
  SimulationConfig c;
  c.p = j.value("p", c.p);
  c.M = j.value("M", c.M);
  c.gridsize = j.value("gridsize", c.gridsize);
  c.dt = j.value("dt", c.dt);
  c.T = j.value("T", c.T);
  c.s = j.value("s", c.s);
  c.N = j.value("N", c.N);
  c.seed = j.value("seed", c.seed);
  c.record_every = j.value("record_every", c.record_every);
  if (j.contains("ic")) {
    const auto& icj = j.at("ic");
    const std::string kind = icj.value("kind", std::string("random"));
    if (kind == "plane_wave") {
      c.ic.kind = InitialCondition::Kind::PlaneWave;
      c.ic.k = icj.value("k", c.ic.k);
      if (icj.contains("amplitude")) {
        const auto& a = icj.at("amplitude");
        c.ic.amplitude = a.is_array() ? cplx(a.at(0).get<double>(), a.at(1).get<double>()) : cplx(a.get<double>());
      }
    } else if (kind == "random") {
      c.ic.hs_norm = icj.value("hs_norm", c.ic.hs_norm);
      c.ic.decay_offset = icj.value("decay_offset", c.ic.decay_offset);
    } else {
      throw ConfigError("simulation: unknown ic.kind '" + kind + "'");
    }
  }
  return c;
}

FourierField initial_condition(const SimulationConfig& cfg) {
  if (cfg.ic.kind == InitialCondition::Kind::PlaneWave) return FourierField::delta(cfg.M, cfg.ic.k, cfg.ic.amplitude);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::vector<cplx> c(static_cast<std::size_t>(2 * cfg.M + 1));
  for (int n = -cfg.M; n <= cfg.M; ++n)
    c[static_cast<std::size_t>(n + cfg.M)] =
        std::polar(std::pow(weight(n, WeightKind::Bracket), -(cfg.s + cfg.ic.decay_offset)), phase(rng));
  FourierField q(cfg.M, std::move(c));
  return q * cplx(cfg.ic.hs_norm / sobolev_norm(q, cfg.s));
}

namespace {

void check_grid(int M, int p, int gridsize) {
  if (gridsize < 2 * (p + 1) * M + 1)
    throw SizingError("gridsize " + std::to_string(gridsize) + " below the dealiasing bound " +
                      std::to_string(2 * (p + 1) * M + 1));
}

}  // namespace

struct NlsStepper::Impl {
  int p, M, G;
  SpectralGrid grid;
  std::vector<cplx> spec, phys;
  double cached_dt = std::numeric_limits<double>::quiet_NaN();
  std::vector<cplx> e_half, e_full;

  Impl(int p_, int M_, int G_) : p(p_), M(M_), G(G_), grid(G_), spec(G_), phys(G_) {}

  void to_grid(const cplx* q) {
    std::fill(spec.begin(), spec.end(), cplx{});
    for (int n = -M; n <= M; ++n) spec[static_cast<std::size_t>((n + G) % G)] = q[n + M];
    grid.backward(spec, phys);
  }

  // out = i * NL(q)
  void rhs(const cplx* q, cplx* out) {
    to_grid(q);
    for (auto& u : phys) u *= std::pow(std::norm(u), p);
    grid.forward(phys, spec);
    const double inv = 1.0 / G;
    for (int n = -M; n <= M; ++n) out[n + M] = cplx(0.0, inv) * spec[static_cast<std::size_t>((n + G) % G)];
  }

  double potential(const cplx* q) {
    to_grid(q);
    double acc = 0.0;
    for (const auto& u : phys) acc += std::pow(std::norm(u), p + 1);
    return 2.0 * M_PI / G * acc / (2.0 * p + 2.0);
  }

  void phases(double h) {
    if (h == cached_dt) return;
    e_half.resize(static_cast<std::size_t>(2 * M + 1));
    e_full.resize(static_cast<std::size_t>(2 * M + 1));
    for (int n = -M; n <= M; ++n) {
      const double w = static_cast<double>(n) * n;
      e_half[static_cast<std::size_t>(n + M)] = std::polar(1.0, w * h / 2);
      e_full[static_cast<std::size_t>(n + M)] = std::polar(1.0, w * h);
    }
    cached_dt = h;
  }
};

NlsStepper::NlsStepper(int p, int M, int gridsize) {
  if (p < 1) throw ConfigError("NlsStepper: p must be >= 1");
  check_grid(M, p, gridsize);
  impl_ = std::make_unique<Impl>(p, M, gridsize);
}

NlsStepper::~NlsStepper() = default;

FourierField NlsStepper::nonlinearity(const FourierField& q) {
  if (q.radius() > impl_->M) throw SizingError("NlsStepper: field radius exceeds the stepper lattice");
  const auto qq = q.resized(impl_->M);
  std::vector<cplx> out(qq.size());
  impl_->rhs(qq.coeffs().data(), out.data());
  for (auto& v : out) v *= cplx(0.0, -1.0);
  return FourierField(impl_->M, std::move(out));
}

FourierField NlsStepper::step(const FourierField& q, double h) {
  auto& I = *impl_;
  if (q.radius() != I.M) throw SizingError("NlsStepper: field radius differs from the stepper lattice");
  I.phases(h);
  const std::size_t L = q.size();
  const cplx* q0 = q.coeffs().data();
  std::vector<cplx> k1(L), k2(L), k3(L), k4(L), a(L), eq(L);
  I.rhs(q0, k1.data());
  for (std::size_t j = 0; j < L; ++j) a[j] = I.e_half[j] * (q0[j] + h / 2 * k1[j]);
  I.rhs(a.data(), k2.data());
  for (std::size_t j = 0; j < L; ++j) a[j] = I.e_half[j] * q0[j] + h / 2 * k2[j];
  I.rhs(a.data(), k3.data());
  for (std::size_t j = 0; j < L; ++j) {
    eq[j] = I.e_full[j] * q0[j];
    a[j] = eq[j] + h * I.e_half[j] * k3[j];
  }
  I.rhs(a.data(), k4.data());
  std::vector<cplx> out(L);
  for (std::size_t j = 0; j < L; ++j) {
    out[j] = eq[j] + h / 6 * (I.e_full[j] * k1[j] + 2.0 * I.e_half[j] * (k2[j] + k3[j]) + k4[j]);
    if (!(std::abs(out[j]) <= 1e6)) throw BlowUpError("NLS step: coefficient magnitude exceeded 1e6");
  }
  return FourierField(I.M, std::move(out));
}

FourierField nonlinearity(const FourierField& q, int p, int gridsize) {
  NlsStepper st(p, q.radius(), gridsize);
  return st.nonlinearity(q);
}

double NlsStepper::hamiltonian(const FourierField& q) {
  if (q.radius() > impl_->M) throw SizingError("NlsStepper: field radius exceeds the stepper lattice");
  const auto qq = q.resized(impl_->M);
  double kinetic = 0.0;
  for (int n = -qq.radius(); n <= qq.radius(); ++n) kinetic += static_cast<double>(n) * n * std::norm(qq[n]);
  return M_PI * kinetic + impl_->potential(qq.coeffs().data());
}

double hamiltonian_physical(const FourierField& q, int p, int gridsize) {
  NlsStepper st(p, q.radius(), gridsize);
  return st.hamiltonian(q);
}

FourierField step(const FourierField& q, double dt, const SimulationConfig& cfg) {
  NlsStepper st(cfg.p, q.radius(), cfg.resolved_gridsize());
  return st.step(q, dt);
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc()) throw std::invalid_argument("csv: bad number '" + s + "'");
  return v;
}

constexpr const char* kCsvHeader = "t,mass,momentum,hamiltonian,hs_norm,d_h1_norm,modified_energy,hh1,hh2,hh3";

}  // namespace

void TimeSeries::write_csv(std::ostream& os) const {
  os << kCsvHeader << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (const auto& r : rows)
    os << fmt(r.t) << ',' << fmt(r.mass) << ',' << fmt(r.momentum) << ',' << fmt(r.hamiltonian) << ','
       << fmt(r.hs_norm) << ',' << fmt(r.d_h1_norm) << ',' << opt(r.modified_energy) << ',' << opt(r.hh1) << ','
       << opt(r.hh2) << ',' << opt(r.hh3) << '\n';
}

TimeSeries TimeSeries::read_csv(std::istream& is) {
  TimeSeries ts;
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw std::invalid_argument("csv: unexpected header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    while (f.size() < 10) f.emplace_back();
    if (f.size() != 10) throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected 10 fields");
    TimeSeriesRow r;
    auto req = [&](int i) {
      auto v = parse_opt(f[static_cast<std::size_t>(i)]);
      if (!v) throw std::invalid_argument("csv line " + std::to_string(lineno) + ": missing required field");
      return *v;
    };
    r.t = req(0);
    r.mass = req(1);
    r.momentum = req(2);
    r.hamiltonian = req(3);
    r.hs_norm = req(4);
    r.d_h1_norm = req(5);
    r.modified_energy = parse_opt(f[6]);
    r.hh1 = parse_opt(f[7]);
    r.hh2 = parse_opt(f[8]);
    r.hh3 = parse_opt(f[9]);
    ts.rows.push_back(r);
  }
  return ts;
}

TimeSeries run(const SimulationConfig& cfg, const ReducedHamiltonian* reduced) {
  cfg.validate();
  if (reduced && reduced->radius() < cfg.M) throw ConfigError("simulation: reduced Hamiltonian radius below M");
  const int G = cfg.resolved_gridsize();
  const MultiplierSpec spec(cfg.N, cfg.s);
  NlsStepper stepper(cfg.p, cfg.M, G);
  std::vector<HomogeneousHamiltonian> n0;
  if (reduced) n0 = reduced->resonant;

  TimeSeries ts;
  auto record = [&](double t, const FourierField& q) {
    TimeSeriesRow r;
    r.t = t;
    r.mass = mass(q);
    r.momentum = momentum(q);
    r.hamiltonian = stepper.hamiltonian(q);
    r.hs_norm = sobolev_norm(q, cfg.s);
    r.d_h1_norm = sobolev_norm(apply_multiplier(q, spec), 1.0);
    if (reduced) {
      const auto qr = q.resized(reduced->radius());
      r.modified_energy = reduced->modified_energy(qr, spec);
      const auto hh = hh_terms(n0, qr, spec, reduced->weights_for(qr));
      r.hh1 = hh.v1;
      r.hh2 = hh.v2;
      r.hh3 = hh.v3;
    }
    ts.rows.push_back(r);
  };

  FourierField q = initial_condition(cfg);
  const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-9)));
  const double h = cfg.T / static_cast<double>(steps);
  record(0.0, q);
  try {
    for (long k = 1; k <= steps; ++k) {
      q = stepper.step(q, h);
      if (k % cfg.record_every == 0 || k == steps) record(k == steps ? cfg.T : h * static_cast<double>(k), q);
    }
  } catch (const BlowUpError& e) {
    ts.aborted = true;
    ts.abort_reason = e.what();
  }
  ts.final_state = q;
  return ts;
}

GrowthFit growth_fit(const TimeSeries& series) {
  if (series.rows.size() < 10) throw std::invalid_argument("growth_fit: need at least 10 rows");
  std::vector<double> x, y;
  for (const auto& r : series.rows) {
    if (!(r.hs_norm > 0.0)) throw std::invalid_argument("growth_fit: nonpositive hs_norm");
    x.push_back(std::log1p(r.t));
    y.push_back(std::log(r.hs_norm));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  GrowthFit g;
  if (syy <= 1e-28 * n || sxx == 0.0) return g;
  g.alpha = sxy / sxx;
  g.r2 = sxy * sxy / (sxx * syy);
  return g;
}

// ---------------------------------------------------------------------------

nlohmann::json DsScanResult::to_json() const {
  return {{"max_ratio", max_ratio}, {"argmax", argmax}, {"evaluated", evaluated}};
}

double ds_ratio(std::span<const int> tuple, double s, double K) {
  if (tuple.size() < 4) throw std::invalid_argument("ds_ratio: degree must be >= 4");
  const double num = std::abs(Ds_value(tuple, s));
  if (num == 0.0) return 0.0;
  std::vector<double> m;
  for (int v : tuple) m.push_back(std::abs(static_cast<double>(v)));
  std::sort(m.rbegin(), m.rend());
  return num / (std::pow(m[0], 2.0 * (s - 1.0)) * (m[2] * m[3] + K));
}

namespace {

void consider(DsScanResult& r, const std::vector<int>& t, double s, double K) {
  ++r.evaluated;
  const double v = ds_ratio(t, s, K);
  if (v > r.max_ratio || r.argmax.empty()) {
    if (v > r.max_ratio || r.argmax.empty()) r.argmax = t;
    r.max_ratio = std::max(r.max_ratio, v);
  }
}

}  // namespace

DsScanResult ds_lemma_exhaustive(double s, double K, int range, int degree, bool resonant_only) {
  if (degree < 4 || degree % 2) throw std::invalid_argument("ds_lemma_exhaustive: degree must be even and >= 4");
  if (!(K > 0.0)) throw std::invalid_argument("ds_lemma_exhaustive: K must be positive");
  DsScanResult r;
  std::vector<int> t(static_cast<std::size_t>(degree));
  auto rec = [&](auto&& self, int j, long long sum) -> void {
    if (j == degree - 1) {
      if (std::llabs(sum) > range) return;
      t.back() = static_cast<int>(sum);
      if (resonant_only && static_cast<double>(std::llabs(D_value(t))) >= K) return;
      consider(r, t, s, K);
      return;
    }
    for (int v = -range; v <= range; ++v) {
      t[static_cast<std::size_t>(j)] = v;
      self(self, j + 1, sum + (j % 2 == 0 ? v : -v));
    }
  };
  rec(rec, 0, 0);
  return r;
}

DsScanResult ds_lemma_scan(double s, double K, int range, long long samples, std::uint64_t seed, bool resonant_only) {
  if (samples < 1) throw std::invalid_argument("ds_lemma_scan: samples must be >= 1");
  if (!(K > 0.0)) throw std::invalid_argument("ds_lemma_scan: K must be positive");
  if (range < 1) throw std::invalid_argument("ds_lemma_scan: range must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> entry(-range, range), pick_degree(2, 4);
  DsScanResult r;
  const int dmax = static_cast<int>(std::ceil(K)) - 1;  // integers with |d| < K
  std::vector<std::pair<int, int>> cands;
  while (r.evaluated < samples) {
    const int degree = 2 * pick_degree(rng);
    std::vector<int> t(static_cast<std::size_t>(degree));
    const int free = resonant_only ? degree - 2 : degree - 1;
    long long S = 0, Q = 0;
    for (int j = 0; j < free; ++j) {
      const int v = entry(rng);
      t[static_cast<std::size_t>(j)] = v;
      S += (j % 2 == 0 ? v : -v);
      Q += (j % 2 == 0 ? 1LL : -1LL) * v * v;
    }
    if (!resonant_only) {
      if (std::llabs(S) > range) continue;
      t.back() = static_cast<int>(S);
      consider(r, t, s, K);
      continue;
    }
    // Slots x (odd) and y (even): x - y = -S and Q + x^2 - y^2 = d with |d| < K.
    cands.clear();
    if (S == 0) {
      if (static_cast<double>(std::llabs(Q)) < K) {
        const int x = entry(rng);
        cands.emplace_back(x, x);
      }
    } else {
      for (int d = -dmax; d <= dmax; ++d) {
        const long long num = Q - d;
        if (num % S) continue;
        const long long sum = num / S;
        if ((sum - S) % 2) continue;
        const long long x = (sum - S) / 2, y = (sum + S) / 2;
        if (std::llabs(x) <= range && std::llabs(y) <= range) cands.emplace_back(int(x), int(y));
      }
    }
    if (cands.empty()) continue;
    const auto [x, y] = cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng)];
    t[static_cast<std::size_t>(degree - 2)] = x;
    t[static_cast<std::size_t>(degree - 1)] = y;
    consider(r, t, s, K);
  }
  return r;
}

}  // namespace nlsnf
