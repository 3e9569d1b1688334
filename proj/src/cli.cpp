#include "nlsnf/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "nlsnf/cubic_explicit.hpp"
#include "nlsnf/errors.hpp"
#include "nlsnf/normal_form.hpp"
#include "nlsnf/simulator.hpp"

namespace nlsnf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A config problem tied to a position in the input file.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loaded {
  fs::path path;
  std::string text;
  json doc;

  int line_of(const std::string& key) const {
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 1;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw SchemaError(path.string() + ":" + std::to_string(line_of(key)) + ": " + key + ": " + msg);
  }
};

Loaded load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ":1: cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  Loaded l{path, ss.str(), {}};
  try {
    l.doc = json::parse(l.text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, l.text.size());
    const int line = 1 + static_cast<int>(std::count(l.text.begin(), l.text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw SchemaError(path.string() + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  if (!l.doc.is_object()) throw SchemaError(path.string() + ":1: top level must be an object");
  return l;
}

void allow_only(const Loaded& l, const json& obj, const std::set<std::string>& keys) {
  for (const auto& [k, v] : obj.items())
    if (!keys.count(k)) l.fail(k, "unknown field");
}

template <class T>
std::optional<T> opt_field(const Loaded& l, const json& obj, const std::string& key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    l.fail(key, std::string("wrong type (") + e.what() + ")");
  }
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream o(p, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + p.string());
  o << s;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

struct Manifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs, outputs;
  bool deterministic = false;
  json extra = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  json to_json() const {
    json j = {{"command", command},
              {"config", config},
              {"seed", seed},
              {"tool_version", kToolVersion},
              {"inputs", inputs},
              {"outputs", outputs},
              {"deterministic", deterministic},
              {"wall_clock_seconds",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }
};

// ---------------------------------------------------------------------------

struct ReduceArgs {
  std::string config;
  std::string out;
  bool deterministic = false;
  std::optional<double> K;
  std::optional<int> steps;
};

int cmd_reduce(const ReduceArgs& a, std::ostream& out) {
  Manifest man;
  man.command = "reduce";
  man.deterministic = a.deterministic;
  man.inputs.push_back(a.config);
  const auto l = load(a.config);
  const auto& j = l.doc;
  allow_only(l, j,
             {"p", "M", "K", "N", "T", "delta", "steps", "taylor_order", "max_degree", "remainder_threshold", "C1",
              "C2", "pipeline", "out", "threads"});
  const int p = opt_field<int>(l, j, "p").value_or(1);
  const auto M = opt_field<int>(l, j, "M");
  if (!M) l.fail("M", "required");
  if (p < 1) l.fail("p", "must be >= 1");
  if (*M < 1 || *M > 32) l.fail("M", "must lie in [1, 32]");
  const std::string pipeline = opt_field<std::string>(l, j, "pipeline").value_or(p == 1 ? "cubic" : "generic");
  if (pipeline != "cubic" && pipeline != "generic") l.fail("pipeline", "must be \"cubic\" or \"generic\"");
  if (pipeline == "cubic" && p != 1) l.fail("pipeline", "the cubic pipeline needs p = 1");

  const auto Kj = opt_field<double>(l, j, "K"), Nj = opt_field<double>(l, j, "N"), Tj = opt_field<double>(l, j, "T"),
             dj = opt_field<double>(l, j, "delta");
  double K = 0.0;
  try {
    K = a.K ? *a.K : resolve_K(Kj.value_or(0.0), Nj.value_or(0.0), Tj.value_or(0.0), dj.value_or(0.0));
  } catch (const ConfigError& e) {
    l.fail(Kj ? "K" : (dj ? "delta" : "K"), e.what());
  }

  ReductionConfig cfg;
  cfg.K = K;
  cfg.steps = a.steps ? *a.steps : opt_field<int>(l, j, "steps").value_or(cfg.steps);
  cfg.taylor_order = opt_field<int>(l, j, "taylor_order").value_or(cfg.taylor_order);
  cfg.max_degree = opt_field<int>(l, j, "max_degree").value_or(default_max_degree(p));
  cfg.remainder_threshold = opt_field<double>(l, j, "remainder_threshold").value_or(cfg.remainder_threshold);
  cfg.C1 = opt_field<double>(l, j, "C1").value_or(cfg.C1);
  cfg.C2 = opt_field<double>(l, j, "C2").value_or(cfg.C2);
  cfg.threads = a.deterministic ? 1 : opt_field<int>(l, j, "threads").value_or(0);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw SchemaError(l.path.string() + ": " + e.what());
  }
  const fs::path outdir = !a.out.empty() ? fs::path(a.out) : fs::path(opt_field<std::string>(l, j, "out").value_or("."));

  const bool cubic = pipeline == "cubic";
  const HamiltonianSum h = cubic ? cubic_start_hamiltonian(*M, K) : nls_hamiltonian(p, *M, K);
  const auto res = reduce(h, cfg, cubic ? 2.0 : 0.0);

  json report = res.report.to_json();
  bool decreasing = true;
  for (const auto& s : res.report.steps) decreasing = decreasing && s.nonres_norm_upper < s.nonres_norm_before;
  report["strictly_decreasing"] = decreasing;
  report["pipeline"] = pipeline;
  report["K"] = K;

  write_json(outdir / "reduced.json", res.reduced.to_json());
  write_json(outdir / "report.json", report);
  man.config = cfg.to_json();
  man.config["p"] = p;
  man.config["M"] = *M;
  man.config["pipeline"] = pipeline;
  man.outputs = {(outdir / "reduced.json").string(), (outdir / "report.json").string()};
  write_json(outdir / "manifest.json", man.to_json());
  out << "reduce: " << res.report.steps.size() << " steps, converged=" << std::boolalpha << res.report.converged
      << ", strictly_decreasing=" << decreasing << ", wrote " << outdir.string() << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out;
  std::string reduced;
  bool fit = false;
  bool deterministic = false;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

json growth_json(const GrowthFit& g, const SimulationConfig& c) {
  return {{"alpha", g.alpha},
          {"r2", g.r2 ? json(*g.r2) : json(nullptr)},
          {"s", c.s},
          {"p", c.p},
          {"T", c.T},
          {"N", c.N},
          {"seed", c.seed}};
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  Manifest man;
  man.command = "simulate";
  man.deterministic = a.deterministic;
  man.inputs.push_back(a.config);
  const auto l = load(a.config);
  const auto& j = l.doc;
  allow_only(l, j, {"p", "M", "gridsize", "dt", "T", "s", "N", "ic", "seed", "seeds", "record_every", "out", "reduced"});
  if (j.contains("ic")) {
    if (!j.at("ic").is_object()) l.fail("ic", "must be an object");
    allow_only(l, j.at("ic"), {"kind", "k", "amplitude", "hs_norm", "decay_offset"});
  }
  SimulationConfig base;
  try {
    base = SimulationConfig::from_json(j);
  } catch (const json::exception& e) {
    // locate the offending key by re-reading each field with its expected type
    for (const char* k : {"p", "M", "gridsize", "record_every"}) opt_field<int>(l, j, k);
    for (const char* k : {"dt", "T", "s"}) opt_field<double>(l, j, k);
    opt_field<std::uint64_t>(l, j, "seed");
    l.fail("ic", e.what());
  } catch (const ConfigError& e) {
    l.fail("ic", e.what());
  }
  std::vector<std::uint64_t> seeds;
  if (a.seed)
    seeds = {*a.seed};
  else if (auto s = opt_field<std::vector<std::uint64_t>>(l, j, "seeds"))
    seeds = *s;
  else
    seeds = {base.seed};
  if (seeds.empty()) l.fail("seeds", "must not be empty");
  try {
    base.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(l.path.string() + ": " + e.what());
  }

  std::optional<ReducedHamiltonian> reduced;
  std::string reduced_path = a.reduced;
  if (reduced_path.empty())
    if (auto r = opt_field<std::string>(l, j, "reduced")) reduced_path = (l.path.parent_path() / *r).string();
  if (!reduced_path.empty()) {
    const auto rl = load(reduced_path);
    try {
      reduced = ReducedHamiltonian::from_json(rl.doc);
    } catch (const std::exception& e) {
      throw SchemaError(reduced_path + ":1: invalid reduced Hamiltonian: " + e.what());
    }
    if (reduced->radius() < base.M) throw SchemaError(reduced_path + ":1: reduced Hamiltonian radius below M");
    man.inputs.push_back(reduced_path);
  }
  const fs::path outdir = !a.out.empty() ? fs::path(a.out) : fs::path(opt_field<std::string>(l, j, "out").value_or("."));

  struct Job {
    SimulationConfig cfg;
    TimeSeries ts;
    std::string csv, growth;
  };
  std::vector<Job> jobs;
  for (auto s : seeds) {
    Job jb;
    jb.cfg = base;
    jb.cfg.seed = s;
    const std::string stem = seeds.size() == 1 ? "series" : "series_seed" + std::to_string(s);
    jb.csv = (outdir / (stem + ".csv")).string();
    jb.growth = (outdir / ((seeds.size() == 1 ? std::string("growth") : "growth_seed" + std::to_string(s)) + ".json"))
                    .string();
    jobs.push_back(std::move(jb));
  }
  const ReducedHamiltonian* rp = reduced ? &*reduced : nullptr;
  const int workers = std::max(1, std::min<int>(a.jobs, static_cast<int>(jobs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) jobs[i].ts = run(jobs[i].cfg, rp);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool aborted = false;
  json runs = json::array();
  for (const auto& jb : jobs) {
    std::ostringstream csv;
    jb.ts.write_csv(csv);
    write_text(jb.csv, csv.str());
    man.outputs.push_back(jb.csv);
    json r = {{"seed", jb.cfg.seed}, {"csv", jb.csv}, {"rows", jb.ts.rows.size()}, {"aborted", jb.ts.aborted}};
    if (jb.ts.aborted) r["abort_reason"] = jb.ts.abort_reason;
    if (a.fit && !jb.ts.aborted && jb.ts.rows.size() >= 10) {
      const auto g = growth_fit(jb.ts);
      write_json(jb.growth, growth_json(g, jb.cfg));
      man.outputs.push_back(jb.growth);
      r["alpha"] = g.alpha;
    }
    aborted = aborted || jb.ts.aborted;
    runs.push_back(r);
    out << "simulate: seed " << jb.cfg.seed << ", " << jb.ts.rows.size() << " rows"
        << (jb.ts.aborted ? " (ABORTED: " + jb.ts.abort_reason + ")" : std::string()) << " -> " << jb.csv << "\n";
  }
  man.config = base.to_json();
  man.config["seeds"] = seeds;
  man.seed = seeds.front();
  man.extra = {{"runs", runs}, {"aborted", aborted}, {"partial", aborted}};
  write_json(outdir / "manifest.json", man.to_json());
  return aborted ? kNumericalAbort : kSuccess;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  int M = 6, N = 8;
  double beta = 0.25;
  bool corrupt = false;
  bool scan = true;
  std::string out;
};

int cmd_verify_cubic(const VerifyArgs& a, std::ostream& out) {
  CubicContext ctx;
  ctx.M = a.M;
  ctx.N = a.N;
  ctx.beta = a.beta;
  const auto rep = verify_cubic(ctx, a.corrupt);
  json j = rep.to_json();
  if (a.scan) j["subcase_scan"] = subcase_scan(64, 96, a.beta).to_json();
  for (const auto& c : rep.identities)
    out << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual " << c.max_residual << "\n";
  for (const auto& c : rep.sign_variants) out << "NOTE sign variant " << c.name << "  residual " << c.max_residual << "\n";
  if (!a.out.empty()) write_json(a.out, j);
  else out << j.dump(2) << "\n";
  return rep.all_pass() ? kSuccess : kVerificationFailure;
}

// ---------------------------------------------------------------------------

struct DsArgs {
  double s = 2.0, K = 1.0;
  int range = 64, baseline_range = 8;
  long long samples = 100000;
  std::uint64_t seed = 1;
  bool resonant_only = false;
  std::string out;
};

int cmd_ds_scan(const DsArgs& a, std::ostream& out) {
  if (a.samples < 1) throw ConfigError("ds-scan: --samples must be >= 1");
  if (!(a.s > 1.0)) throw ConfigError("ds-scan: --s must be > 1");
  if (!(a.K > 0.0)) throw ConfigError("ds-scan: --K must be positive");
  if (a.range < 1 || a.baseline_range < 1) throw ConfigError("ds-scan: ranges must be >= 1");
  const auto base = ds_lemma_exhaustive(a.s, a.K, a.baseline_range, 4);
  const auto scan = ds_lemma_scan(a.s, a.K, a.range, a.samples, a.seed, a.resonant_only);
  json j = {{"params",
             {{"s", a.s},
              {"K", a.K},
              {"range", a.range},
              {"baseline_range", a.baseline_range},
              {"samples", a.samples},
              {"seed", a.seed},
              {"resonant_only", a.resonant_only}}},
            {"baseline", base.to_json()},
            {"scan", scan.to_json()},
            {"ratio_to_baseline", base.max_ratio > 0 ? json(scan.max_ratio / base.max_ratio) : json(nullptr)}};
  if (!a.out.empty()) write_json(a.out, j);
  else out << j.dump(2) << "\n";
  out << "ds-scan: baseline " << base.max_ratio << ", scan max " << scan.max_ratio << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct GrowthArgs {
  std::string csv, out, manifest;
  std::optional<double> s, T;
  std::optional<int> p, N;
  std::optional<std::uint64_t> seed;
};

int cmd_growth_report(const GrowthArgs& a, std::ostream& out) {
  std::ifstream in(a.csv);
  if (!in) throw SchemaError(a.csv + ":1: cannot open file");
  TimeSeries ts;
  try {
    ts = TimeSeries::read_csv(in);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(a.csv + ": " + e.what());
  }
  SimulationConfig meta;
  const fs::path mpath = !a.manifest.empty() ? fs::path(a.manifest) : fs::path(a.csv).parent_path() / "manifest.json";
  if (fs::exists(mpath)) {
    const auto m = load(mpath);
    if (m.doc.contains("config")) {
      const auto& c = m.doc.at("config");
      meta.s = c.value("s", meta.s);
      meta.p = c.value("p", meta.p);
      meta.T = c.value("T", meta.T);
      meta.N = c.value("N", meta.N);
      meta.seed = m.doc.value("seed", meta.seed);
    }
  }
  if (a.s) meta.s = *a.s;
  if (a.p) meta.p = *a.p;
  if (a.T) meta.T = *a.T;
  if (a.N) meta.N = *a.N;
  if (a.seed) meta.seed = *a.seed;
  GrowthFit g;
  try {
    g = growth_fit(ts);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(a.csv + ": " + e.what());
  }
  const json j = growth_json(g, meta);
  if (!a.out.empty()) write_json(a.out, j);
  else out << j.dump(2) << "\n";
  return kSuccess;
}

}  // namespace

double resolve_K(double K, double N, double T, double delta) {
  if (K > 0.0) return K;
  if (delta > 0.0 && N > 0.0) return std::pow(N, delta);
  if (delta > 0.0 && T > 0.0) return std::pow(T, delta);
  throw ConfigError("give K > 0, or delta > 0 together with N or T");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Normal-form and simulation toolkit for periodic NLS"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "Run the normal-form reduction pipeline from a JSON config");
  reduce->add_option("config", ra.config, "Config JSON")->required();
  reduce->add_option("--out", ra.out, "Output directory (overrides the config's out)");
  reduce->add_flag("--deterministic", ra.deterministic, "Single-threaded brackets");
  reduce->add_option("--K", ra.K, "Override K");
  reduce->add_option("--steps", ra.steps, "Override steps");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Integrate NLS and write a CSV time series");
  simulate->add_option("config", sa.config, "Config JSON")->required();
  simulate->add_option("--out", sa.out, "Output directory");
  simulate->add_option("--reduced", sa.reduced, "Reduced Hamiltonian JSON for modified-energy columns");
  simulate->add_flag("--fit", sa.fit, "Also write a growth report");
  simulate->add_flag("--deterministic", sa.deterministic, "Deterministic run");
  simulate->add_option("--jobs", sa.jobs, "Parallel trajectories for seed sweeps")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed, "Override the seed");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-cubic", "Check the cubic normal-form identities");
  verify->add_option("--M", va.M, "Lattice radius (<= 8)");
  verify->add_option("--N", va.N, "Multiplier cutoff");
  verify->add_option("--beta", va.beta, "Resonance exponent in (0, 1)");
  verify->add_flag("--corrupt", va.corrupt, "Flip one F1 coefficient (negative control)");
  verify->add_flag("!--no-scan", va.scan, "Skip the subcase scan");
  verify->add_option("--out", va.out, "Report path (stdout if omitted)");

  DsArgs da;
  auto* ds = app.add_subcommand("ds-scan", "Sample the D_s ratio against the exhaustive degree-4 baseline");
  ds->add_option("--s", da.s, "Sobolev index");
  ds->add_option("--K", da.K, "Resonance threshold");
  ds->add_option("--range", da.range, "Entry range for random tuples");
  ds->add_option("--baseline-range", da.baseline_range, "Entry range for the exhaustive baseline");
  ds->add_option("--samples", da.samples, "Random samples");
  ds->add_option("--seed", da.seed, "Seed");
  ds->add_flag("--resonant-only", da.resonant_only, "Sample only tuples with |D| < K");
  ds->add_option("--out", da.out, "Report path (stdout if omitted)");

  GrowthArgs ga;
  auto* growth = app.add_subcommand("growth-report", "Refit the growth exponent of an existing CSV");
  growth->add_option("csv", ga.csv, "TimeSeries CSV")->required();
  growth->add_option("--out", ga.out, "Report path (stdout if omitted)");
  growth->add_option("--manifest", ga.manifest, "Manifest with run metadata (default: next to the CSV)");
  growth->add_option("--s", ga.s);
  growth->add_option("--p", ga.p);
  growth->add_option("--T", ga.T);
  growth->add_option("--N", ga.N);
  growth->add_option("--seed", ga.seed);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*reduce) return cmd_reduce(ra, out);
    if (*simulate) return cmd_simulate(sa, out);
    if (*verify) return cmd_verify_cubic(va, out);
    if (*ds) return cmd_ds_scan(da, out);
    if (*growth) return cmd_growth_report(ga, out);
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SizingError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const BlowUpError& e) {
    err << "error: numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  }
  return kConfigError;
}

}  // namespace nlsnf::cli
