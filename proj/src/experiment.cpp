#include "ridgeapprox/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "ridgeapprox/errors.hpp"
#include "ridgeapprox/packing.hpp"
#include "ridgeapprox/quadrature.hpp"
#include "ridgeapprox/rng.hpp"

namespace ridge {

namespace {

const std::vector<std::string> kMethods{"iid", "iid-simplified", "stratified-signed",
                                        "stratified-fractional", "sparse"};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<int> parse_theta(std::string text) {
  text = trim(text);
  if (!text.empty() && text.front() == '(') {
    if (text.back() != ')') throw UsageError("sine-ridge: unbalanced parentheses");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<int> theta;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;  // allows "(1,)"
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw UsageError("sine-ridge: '" + item + "' is not an integer");
    }
    if (used != item.size()) throw UsageError("sine-ridge: '" + item + "' is not an integer");
    if (v < 1) throw UsageError("sine-ridge: entries of theta must be positive");
    theta.push_back(v);
  }
  if (theta.empty()) throw UsageError("sine-ridge: empty theta");
  return theta;
}

std::optional<double> parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

double epsilon_for(const ExperimentConfig& cfg, long m, int dim, AllocationMode mode) {
  if (cfg.epsilon == "default") return default_epsilon(m, dim, mode);
  if (cfg.epsilon == "inverse-m") return 1.0 / static_cast<double>(m);
  auto v = parse_number(cfg.epsilon);
  if (!v || !(*v > 0.0)) throw UsageError("epsilon must be 'default', 'inverse-m' or a positive number");
  return *v;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

io::Json manifest(const ExperimentConfig& cfg, const std::string& command,
                  const std::vector<std::string>& files) {
  io::Json j;
  j["tool"] = "ridgeapprox";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config_hash"] = config_hash(cfg);
  j["config"] = cfg.to_json();
  j["files"] = files;
  return j;
}

QuadratureSpec quad_spec(const ExperimentConfig& cfg) {
  QuadratureSpec q;
  q.nodes_per_axis = cfg.quad_nodes;
  return q;
}

GridSpec grid_spec(const ExperimentConfig& cfg) {
  GridSpec g;
  g.resolution = cfg.grid_resolution;
  return g;
}

void check_scale(const ExperimentConfig& cfg, int dim) {
  if (!cfg.allow_large && dim > 4)
    throw UsageError("dimension above 4 refused without --allow-large");
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (methods.empty()) throw UsageError("no method given");
  for (const auto& mt : methods)
    if (std::find(kMethods.begin(), kMethods.end(), mt) == kMethods.end())
      throw UsageError("unknown method '" + mt + "'");
  if (m.empty()) throw UsageError("m list is empty");
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] < 1) throw UsageError("m values must be positive");
    if (i > 0 && m[i] <= m[i - 1]) throw UsageError("m list must be strictly increasing");
  }
  if (seeds.empty()) throw UsageError("seed list is empty");
  if (order != 2 && order != 3) throw UsageError("s must be 2 or 3");
  if (m0 < 1) throw UsageError("m0 must be positive");
  if (mass_mode != "exact" && mass_mode != "estimated")
    throw UsageError("mass mode must be 'exact' or 'estimated'");
  if (epsilon != "default" && epsilon != "inverse-m") {
    auto v = parse_number(epsilon);
    if (!v || !(*v > 0.0)) throw UsageError("epsilon must be 'default', 'inverse-m' or a positive number");
  }
  if (quad_nodes < 0 || grid_resolution < 0 || threads < 0)
    throw UsageError("resolutions and thread count must be nonnegative");
  if (grid_resolution == 1) throw UsageError("grid resolution must be at least 2");
  if (!allow_large) {
    if (m.back() > 4096) throw UsageError("m above 4096 refused without --allow-large");
    if (seeds.size() > 50) throw UsageError("more than 50 seeds refused without --allow-large");
  }
}

io::Json ExperimentConfig::to_json() const {
  io::Json j;
  j["target"] = target;
  j["methods"] = methods;
  j["m"] = m;
  j["seeds"] = seeds;
  j["s"] = order;
  j["epsilon"] = epsilon;
  j["m0"] = m0;
  j["mass_mode"] = mass_mode;
  j["quad_nodes"] = quad_nodes;
  j["grid_resolution"] = grid_resolution;
  j["allow_large"] = allow_large;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const io::Json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  std::string mode = "fractional";
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "target") c.target = val.get<std::string>();
      else if (key == "method") c.methods = {val.get<std::string>()};
      else if (key == "methods") c.methods = val.get<std::vector<std::string>>();
      else if (key == "m") c.m = val.is_array() ? val.get<std::vector<long>>() : std::vector<long>{val.get<long>()};
      else if (key == "seeds" || key == "seed")
        c.seeds = val.is_array() ? val.get<std::vector<std::uint64_t>>()
                                 : std::vector<std::uint64_t>{val.get<std::uint64_t>()};
      else if (key == "s") c.order = val.get<int>();
      else if (key == "epsilon") c.epsilon = val.is_number() ? fmt(val.get<double>()) : val.get<std::string>();
      else if (key == "m0") c.m0 = val.get<int>();
      else if (key == "mode") mode = val.get<std::string>();
      else if (key == "mass_mode") c.mass_mode = val.get<std::string>();
      else if (key == "quad_nodes") c.quad_nodes = val.get<int>();
      else if (key == "grid_resolution") c.grid_resolution = val.get<int>();
      else if (key == "threads") c.threads = val.get<int>();
      else if (key == "allow_large") c.allow_large = val.get<bool>();
      else if (key == "out") c.out = val.get<std::string>();
      else throw UsageError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
  if (mode != "signed" && mode != "fractional") throw UsageError("mode must be 'signed' or 'fractional'");
  for (auto& mt : c.methods)
    if (mt == "stratified") mt = "stratified-" + mode;
  return c;
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(cfg.to_json().dump())));
  return buf;
}

ResolvedTarget resolve_target(const std::string& spec, int order) {
  if (order != 2 && order != 3) throw UsageError("s must be 2 or 3");
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("target '" + spec + "' has no ':'");
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "sine-ridge") {
    const auto theta = parse_theta(arg);
    auto meas = scaled_sine_measure(theta);
    if (order == 2) {
      return {spec, TargetFunction::scaled_sine(theta), IntegralRepresentation::exact_sine(theta), meas};
    }
    return {spec, TargetFunction::from_spectral(meas), IntegralRepresentation::from_spectral(meas, 3), meas};
  }
  if (kind == "cosine-sum") {
    if (arg.empty()) throw UsageError("cosine-sum needs a file name");
    auto meas = io::load_measure(arg);
    return {spec, TargetFunction::from_spectral(meas), IntegralRepresentation::from_spectral(meas, order), meas};
  }
  throw UsageError("unknown target kind '" + kind + "'");
}

RidgeCombination build_method(const ResolvedTarget& target, const std::string& method,
                              long m, std::uint64_t seed, const ExperimentConfig& cfg) {
  const auto& rep = target.representation;
  if (method == "iid") return build_iid(rep, m, target.function, seed);
  if (method == "iid-simplified") {
    if (!target.measure) throw UsageError("iid-simplified needs a spectral target");
    return build_iid_simplified(*target.measure, rep.order(), m, target.function, seed);
  }
  if (method == "stratified-signed" || method == "stratified-fractional") {
    const auto mode = method == "stratified-signed" ? AllocationMode::Signed : AllocationMode::Fractional;
    StratifiedOptions opt;
    opt.mass_mode = cfg.mass_mode == "estimated" ? MassMode::Estimated : MassMode::Exact;
    return build_stratified(rep, m, epsilon_for(cfg, m, rep.dim(), mode), mode,
                            target.function, seed, opt);
  }
  if (method == "sparse") return build_sparse(rep, m, cfg.m0, target.function, seed);
  throw UsageError("unknown method '" + method + "'");
}

// ---------------------------------------------------------------------------

SweepResult rate_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.m.size() < 3) throw UsageError("rate-sweep needs at least 3 m values");
  if (cfg.seeds.size() < 10) throw UsageError("rate-sweep needs at least 10 seeds");
  const ResolvedTarget target = resolve_target(cfg.target, cfg.order);
  check_scale(cfg, target.function.dim);
  const int dim = target.function.dim;

  struct Cell {
    std::string method;
    long m;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& mt : cfg.methods)
    for (long m : cfg.m)
      for (auto s : cfg.seeds) cells.push_back({mt, m, s});

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      SweepRow& row = rows[i];
      row.report.m = c.m;
      row.report.method = c.method;
      row.report.seed = c.seed;
      row.floor = lower_bound_floor(std::max(c.m, 2L), dim, cfg.order, 1.0);
      try {
        const auto comb = build_method(target, c.method, c.m, c.seed, cfg);
        row.report = measure(target.function, comb, c.m, c.method, c.seed, quad_spec(cfg), grid_spec(cfg));
        // the floor is over combinations with as many ridge terms as were used
        const long used = std::max<long>(c.m, static_cast<long>(comb.size()));
        row.floor = lower_bound_floor(std::max(used, 2L), dim, cfg.order, 1.0);
      } catch (const std::exception& e) {
        row.status = std::string("failed: ") + e.what();
        row.report.l2 = row.report.linf = std::nan("");
      }
    }
  };
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.report.method != b.report.method) return a.report.method < b.report.method;
    if (a.report.m != b.report.m) return a.report.m < b.report.m;
    return a.report.seed < b.report.seed;
  });

  SweepResult out;
  out.hash = config_hash(cfg);
  out.rows = std::move(rows);
  for (const auto& r : out.rows) {
    if (r.status != "ok") ++out.failed;
    else if (r.report.l2 < r.floor) ++out.floor_violations;
  }

  io::Json methods = io::Json::array();
  std::vector<std::string> sorted_methods = cfg.methods;
  std::sort(sorted_methods.begin(), sorted_methods.end());
  sorted_methods.erase(std::unique(sorted_methods.begin(), sorted_methods.end()), sorted_methods.end());
  for (const auto& mt : sorted_methods) {
    io::Json entry;
    entry["method"] = mt;
    io::Json means = io::Json::array();
    std::vector<std::pair<double, double>> l2_pts, linf_pts;
    double best = std::numeric_limits<double>::infinity();
    bool floor_ok = true;
    for (long m : cfg.m) {
      double s2 = 0.0, si = 0.0;
      std::size_t n = 0;
      double floor = 0.0;
      for (const auto& r : out.rows) {
        if (r.report.method != mt || r.report.m != m) continue;
        floor = std::max(floor, r.floor);
        if (r.status != "ok") continue;
        s2 += r.report.l2;
        si += r.report.linf;
        best = std::min(best, r.report.l2);
        if (r.report.l2 < r.floor) floor_ok = false;
        ++n;
      }
      io::Json e;
      e["m"] = m;
      e["count"] = n;
      e["floor"] = floor;
      if (n > 0) {
        e["l2"] = s2 / n;
        e["linf"] = si / n;
        l2_pts.emplace_back(static_cast<double>(m), s2 / n);
        linf_pts.emplace_back(static_cast<double>(m), si / n);
      } else {
        e["l2"] = nullptr;
        e["linf"] = nullptr;
      }
      means.push_back(std::move(e));
    }
    auto try_fit = [](const std::vector<std::pair<double, double>>& pts) -> io::Json {
      try {
        return io::to_json(fit_rate(pts));
      } catch (const UsageError&) {
        return nullptr;
      }
    };
    entry["l2"] = try_fit(l2_pts);
    entry["linf"] = try_fit(linf_pts);
    entry["best_l2"] = std::isfinite(best) ? io::Json(best) : io::Json(nullptr);
    entry["floor_ok"] = floor_ok;
    entry["means"] = std::move(means);
    methods.push_back(std::move(entry));
  }
  out.fits["version"] = io::kFormatVersion;
  out.fits["config_hash"] = out.hash;
  out.fits["target"] = cfg.target;
  out.fits["dim"] = dim;
  out.fits["s"] = cfg.order;
  out.fits["rows"] = out.rows.size();
  out.fits["failed"] = out.failed;
  out.fits["floor_violations"] = out.floor_violations;
  out.fits["methods"] = std::move(methods);
  return out;
}

std::string results_csv_header() { return report_csv_header() + ",floor,status"; }

std::string results_csv(const SweepResult& r) {
  std::string s = results_csv_header() + "\n";
  for (const auto& row : r.rows) {
    s += report_csv_row(row.report) + "," + fmt(row.floor) + ",";
    std::string status = row.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    s += status + "\n";
  }
  return s;
}

int run_build(const ExperimentConfig& cfg) {
  ResolvedTarget target;
  try {
    cfg.validate();
    if (cfg.methods.size() != 1) throw UsageError("build takes exactly one method");
    if (cfg.m.size() != 1) throw UsageError("build takes exactly one m");
    target = resolve_target(cfg.target, cfg.order);
    check_scale(cfg, target.function.dim);
  } catch (const UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const std::string& method = cfg.methods.front();
  const long m = cfg.m.front();
  const std::uint64_t seed = cfg.seeds.front();
  RidgeCombination comb;
  try {
    comb = build_method(target, method, m, seed, cfg);
  } catch (const UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "build failed: " << e.what() << "\n";
    return kExitBuild;
  }
  const auto report = measure(target.function, comb, m, method, seed, quad_spec(cfg), grid_spec(cfg));
  std::filesystem::create_directories(cfg.out);
  io::write_json(cfg.out / "combination.json", io::to_json(comb));
  io::write_text(cfg.out / "report.csv", report_csv_header() + "\n" + report_csv_row(report) + "\n");
  io::write_json(cfg.out / "manifest.json",
                 manifest(cfg, "build", {"combination.json", "report.csv"}));
  std::cout << report_csv_header() << "\n" << report_csv_row(report) << "\n";
  return kExitOk;
}

int run_rate_sweep(const ExperimentConfig& cfg) {
  SweepResult r;
  try {
    r = rate_sweep(cfg);
  } catch (const UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::filesystem::create_directories(cfg.out);
  io::write_text(cfg.out / "results.csv", results_csv(r));
  io::write_json(cfg.out / "fits.json", r.fits);
  io::write_json(cfg.out / "manifest.json",
                 manifest(cfg, "rate-sweep", {"results.csv", "fits.json"}));
  for (const auto& e : r.fits["methods"]) {
    std::cout << e["method"].get<std::string>();
    for (const char* key : {"l2", "linf"}) {
      std::cout << "  " << key << " slope ";
      if (e[key].is_null()) std::cout << "n/a";
      else std::cout << fmt(e[key]["slope"].get<double>());
    }
    std::cout << "\n";
  }
  if (r.floor_violations > 0)
    std::cerr << r.floor_violations << " row(s) below the lower-bound floor\n";
  if (r.failed == r.rows.size()) {
    std::cerr << "every sweep cell failed\n";
    return kExitBuild;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

namespace {

void add(std::vector<CheckResult>& out, std::string name, double value, double tol, bool pass) {
  out.push_back({std::move(name), value, tol, pass});
}

void verify_identities(std::vector<CheckResult>& out, std::uint64_t seed) {
  CounterRng rng(seed, 0x1de7);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double c = 4.0 * (1.0 - rng.uniform());  // (0, 4]
    const double z = c * (2.0 * rng.uniform() - 1.0);
    worst = std::max(worst, verify_ramp_identity(z, c));
  }
  add(out, "ramp_identity_max_residual", worst, 1e-8, worst <= 1e-8);

  worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int d = 1 + static_cast<int>(rng.below(3));
    std::vector<double> x(static_cast<std::size_t>(d)), w(static_cast<std::size_t>(d));
    double l1 = 0.0;
    for (int k = 0; k < d; ++k) {
      x[static_cast<std::size_t>(k)] = 2.0 * rng.uniform() - 1.0;
      w[static_cast<std::size_t>(k)] = 2.0 * rng.uniform() - 1.0;
      l1 += std::abs(w[static_cast<std::size_t>(k)]);
    }
    const double target = 4.0 * std::numbers::pi * (1.0 - rng.uniform());
    for (auto& wk : w) wk *= target / l1;
    worst = std::max(worst, verify_square_identity(x, w));
  }
  add(out, "square_identity_max_residual", worst, 1e-8, worst <= 1e-8);
}

void verify_sine_family(std::vector<CheckResult>& out) {
  double off = 0.0, norm_err = 0.0;
  for (int d = 1; d <= 2; ++d) {
    for (int R = 1; R <= 4; ++R) {
      const SineFamily fam(R, d);
      const auto g = fam.gram_quadrature();
      const std::size_t n = fam.size();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) norm_err = std::max(norm_err, std::abs(std::sqrt(g[i * n + i]) - fam[i].norm));
          else off = std::max(off, std::abs(g[i * n + j]));
        }
    }
  }
  add(out, "gram_offdiagonal_max", off, 1e-8, off <= 1e-8);
  add(out, "norm_formula_max_error", norm_err, 1e-8, norm_err <= 1e-8);

  double abs_err = 0.0;
  for (int K = 1; K <= 8; ++K) {
    std::vector<double> breaks;
    for (int k = 1; k < K; ++k) breaks.push_back(static_cast<double>(k) / K);
    const double q = quad::piecewise_gauss(
        [K](double t) { return std::abs(std::sin(std::numbers::pi * K * t)); }, 0.0, 1.0, breaks, 30);
    abs_err = std::max(abs_err, std::abs(q - 2.0 / std::numbers::pi));
    abs_err = std::max(abs_err, std::abs(abs_sine_integral(std::numbers::pi * K, 0.0, 0.0, 1.0) -
                                         2.0 / std::numbers::pi));
  }
  add(out, "abs_sine_integral_error", abs_err, 1e-10, abs_err <= 1e-10);
}

void verify_packing(std::vector<CheckResult>& out, std::uint64_t seed) {
  const SineFamily fam(4, 2);
  const auto target = static_cast<std::size_t>(std::ceil(packing_cardinality(fam.size())));
  const auto set = select_packing(fam, target, seed);
  add(out, "packing_size_at_16", static_cast<double>(set.codewords.size()), 4.0,
      set.codewords.size() >= 4);
  double margin = set.min_distance - set.separation_bound;
  // recompute the minimum from scratch rather than trusting the selector
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.codewords.size(); ++i)
    for (std::size_t j = i + 1; j < set.codewords.size(); ++j)
      mn = std::min(mn, pairwise_distance(fam, set.codewords[i], set.codewords[j]));
  margin = std::min(margin, mn - set.separation_bound);
  add(out, "packing_separation_margin", margin, 0.0, margin >= 0.0);

  const SineFamily small(2, 2);
  CounterRng rng(seed, 0x9ac5);
  double cf_err = 0.0;
  for (int k = 0; k < 5; ++k) {
    Codeword a(small.size()), b(small.size());
    for (auto& x : a) x = static_cast<std::uint8_t>(rng.next_u64() >> 63);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng.next_u64() >> 63);
    cf_err = std::max(cf_err, std::abs(pairwise_distance(small, a, b) -
                                       pairwise_distance_quadrature(small, a, b)));
  }
  add(out, "closed_form_vs_quadrature_distance", cf_err, 1e-8, cf_err <= 1e-8);

  double curve_gap = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= 2; ++d) {
    const int R = 4;
    const double count = packing_cardinality(static_cast<std::size_t>(std::pow(R, d)));
    const double curve = packing_lower_curve(packing_epsilon(R, d), d);
    curve_gap = std::min(curve_gap, count - std::exp(curve));
  }
  add(out, "cardinality_above_curve", curve_gap, -1e-9, curve_gap >= -1e-9);
}

void verify_sampler_fit(std::vector<CheckResult>& out, std::uint64_t seed) {
  constexpr std::size_t kDraws = 200'000;
  // threshold histogram against the density's exact bin masses
  {
    const auto rep = IntegralRepresentation::exact_sine({1});
    const auto atoms = sample_atom(rep, kDraws, seed);
    constexpr int kBins = 20;
    std::vector<double> observed(kBins, 0.0), expected(kBins, 0.0);
    for (const auto& a : atoms) observed[std::min(kBins - 1, static_cast<int>(a.t * kBins))] += 1.0;
    for (const auto& p : rep.pieces())
      for (int b = 0; b < kBins; ++b)
        expected[b] += kDraws * p.mass * rep.piece_mass(p, b / double(kBins), (b + 1) / double(kBins)) /
                       rep.piece_mass(p, 0.0, 1.0);
    double chi2 = 0.0;
    for (int b = 0; b < kBins; ++b)
      if (expected[b] > 0.0) chi2 += (observed[b] - expected[b]) * (observed[b] - expected[b]) / expected[b];
    add(out, "threshold_histogram_chi2_19dof", chi2, 43.82, chi2 <= 43.82);
  }
  auto zscore = [&](const std::vector<double>& samples, double truth) {
    double mean = 0.0, sq = 0.0;
    for (double s : samples) mean += s;
    mean /= samples.size();
    for (double s : samples) sq += (s - mean) * (s - mean);
    const double se = std::sqrt(sq / (samples.size() - 1) / samples.size());
    return se > 0.0 ? std::abs(mean - truth) / se : (mean == truth ? 0.0 : INFINITY);
  };
  CounterRng pts(seed, 0x9e7);
  std::vector<std::vector<double>> probes(10, std::vector<double>(2));
  for (auto& p : probes)
    for (auto& x : p) x = 2.0 * pts.uniform() - 1.0;
  // mixture of atoms reproduces the represented function
  {
    const auto rep = IntegralRepresentation::exact_sine({1, 1});
    const auto atoms = sample_atom(rep, kDraws, seed + 1);
    double worst = 0.0;
    std::vector<double> vals(atoms.size());
    for (const auto& x : probes) {
      for (std::size_t k = 0; k < atoms.size(); ++k) vals[k] = rep.scale() * eval_atom(atoms[k], x);
      worst = std::max(worst, zscore(vals, rep.residual(x)));
    }
    add(out, "exact_sine_mixture_max_zscore", worst, 4.0, worst <= 4.0);
  }
  // simplified density is unbiased for both orders
  for (int s : {2, 3}) {
    const auto meas = scaled_sine_measure({1, 2});
    const auto rep = IntegralRepresentation::from_spectral(meas, s);
    const auto sample = sample_atom_simplified(meas, s, kDraws, seed + 1 + s);
    const double factor = s == 3 ? 0.5 : 1.0;
    double worst = 0.0;
    std::vector<double> vals(sample.terms.size());
    for (const auto& x : probes) {
      for (std::size_t k = 0; k < sample.terms.size(); ++k) {
        const auto& t = sample.terms[k];
        double z = -t.atom.t;
        for (std::size_t i = 0; i < x.size(); ++i) z += t.atom.a[i] * x[i];
        vals[k] = factor * sample.v * t.b * ramp_power(z, s);
      }
      worst = std::max(worst, zscore(vals, rep.residual(x)));
    }
    add(out, "simplified_sampler_s" + std::to_string(s) + "_max_zscore", worst, 4.0, worst <= 4.0);
  }
}

}  // namespace

std::vector<CheckResult> verify_suite(const std::string& which, std::uint64_t seed) {
  std::vector<CheckResult> out;
  if (which == "identities") verify_identities(out, seed);
  else if (which == "sine-family") verify_sine_family(out);
  else if (which == "packing") verify_packing(out, seed);
  else if (which == "sampler-fit") verify_sampler_fit(out, seed);
  else throw UsageError("unknown verify suite '" + which + "'");
  return out;
}

io::Json to_json(const std::vector<CheckResult>& checks) {
  io::Json arr = io::Json::array();
  for (const auto& c : checks) {
    io::Json j;
    j["check"] = c.check;
    j["value"] = c.value;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    arr.push_back(std::move(j));
  }
  return arr;
}

int run_verify(const std::string& which, std::uint64_t seed,
               const std::optional<std::filesystem::path>& out) {
  std::vector<CheckResult> checks;
  try {
    checks = verify_suite(which, seed);
  } catch (const UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  io::Json report;
  report["suite"] = which;
  report["seed"] = seed;
  report["checks"] = to_json(checks);
  bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  report["pass"] = ok;
  std::cout << report.dump(2) << "\n";
  if (out) {
    std::filesystem::create_directories(*out);
    io::write_json(*out / ("verify-" + which + ".json"), report);
  }
  return ok ? kExitOk : kExitCheckFailed;
}

std::vector<std::pair<std::string, std::string>> catalog() {
  return {
      {"sine-ridge:THETA",
       "sin(pi theta.x) / (4 pi ||theta||_1^2) with positive integer theta, e.g. sine-ridge:(1,2)"},
      {"cosine-sum:FILE",
       "sum of mag cos(omega.x + phase) read from a JSON file {dim, atoms:[{omega, mag, phase}]}"},
  };
}

}  // namespace ridge
