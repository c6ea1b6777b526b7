// One line per acceptance criterion; exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "ridgeapprox/construct.hpp"
#include "ridgeapprox/experiment.hpp"
#include "ridgeapprox/metrics.hpp"
#include "ridgeapprox/packing.hpp"
#include "ridgeapprox/quadrature.hpp"

using namespace ridge;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& what) {
  std::printf("              info  %s\n", what.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const CheckResult* find(const std::vector<CheckResult>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.check == name) return &c;
  return nullptr;
}

bool all_pass(const std::vector<CheckResult>& checks) {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::vector<std::uint64_t> seeds(int n) {
  std::vector<std::uint64_t> s;
  for (int i = 1; i <= n; ++i) s.push_back(static_cast<std::uint64_t>(i));
  return s;
}

const io::Json& method_fit(const SweepResult& r, const std::string& method) {
  for (const auto& e : r.fits["methods"])
    if (e["method"] == method) return e;
  throw std::runtime_error("method missing from fits: " + method);
}

double mean_at(const io::Json& entry, long m, const char* key) {
  for (const auto& e : entry["means"])
    if (e["m"] == m) return e[key].get<double>();
  return std::nan("");
}

// every successful row against its own floor
bool floor_holds(const SweepResult& r, std::size_t& violations) {
  violations = 0;
  for (const auto& row : r.rows)
    if (row.status == "ok" && row.report.l2 < row.floor) ++violations;
  return violations == 0 && r.failed == 0;
}

std::vector<SweepResult> sweeps;  // every sweep run here, for the floor check

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = verify_suite("identities", 1);
  const double dt = seconds_since(t0);
  const auto* ramp = find(checks, "ramp_identity_max_residual");
  const auto* square = find(checks, "square_identity_max_residual");
  const bool ok = ramp && square && all_pass(checks) && dt < 10.0;
  report(1, ok,
         fmt("identities at 100 + 100 random inputs: max residual %.2e (ramp), %.2e (square) <= 1e-8; %.2f s < 10 s",
             ramp ? ramp->value : NAN, square ? square->value : NAN, dt));
}

// v E_P[eta (a.x - t)_+] by Gauss-Legendre over the pieces of the implemented
// density, split at the ramp kink
double representation_quadrature(const IntegralRepresentation& rep, std::span<const double> x) {
  double total = 0.0;
  const auto& comps = rep.components();
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    const auto& comp = comps[ci];
    double ax = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) ax += comp.a[i] * x[i];
    if (ax <= 0.0) continue;
    std::vector<double> breaks;
    for (const auto& p : rep.pieces())
      if (p.component == static_cast<int>(ci)) breaks.push_back(p.t0), breaks.push_back(p.t1);
    const int c = static_cast<int>(ci);
    auto integrand = [&](double t) { return rep.eta_at(c, t) * rep.density(c, t) * std::max(0.0, ax - t); };
    total += quad::piecewise_gauss(integrand, 0.0, std::min(ax, 1.0), breaks, 24);
  }
  return total;
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0, literal_gap = 0.0;
  for (const std::vector<int>& theta : {std::vector<int>{1}, std::vector<int>{2}, std::vector<int>{1, 1}}) {
    const auto rep = IntegralRepresentation::exact_sine(theta);
    const int d = static_cast<int>(theta.size());
    int k = 0;
    for (int t : theta) k += t;
    const long n = d == 1 ? 101 : 101 * 101;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (long p = 0; p < n; ++p) {
      x[0] = -1.0 + 0.02 * static_cast<double>(p % 101);
      if (d == 2) x[1] = -1.0 + 0.02 * static_cast<double>(p / 101);
      double tx = 0.0;
      for (int i = 0; i < d; ++i) tx += theta[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      const double q = representation_quadrature(rep, x);
      const double expect = std::sin(kPi * tx) / (4 * kPi * k * k) - tx / (4.0 * k * k);
      const double literal = std::sin(kPi * tx) / (4 * kPi * k * k) - tx / (4 * kPi * k * k);
      worst = std::max(worst, std::abs(q - expect));
      literal_gap = std::max(literal_gap, std::abs(q - literal));
    }
  }
  const double dt = seconds_since(t0);
  report(2, worst <= 1e-6 && dt < 60.0,
         fmt("exact sine representations (1), (2), (1,1) on 101^d grids: max error %.2e <= 1e-6; %.2f s < 60 s",
             worst, dt));
  info(fmt("linear term theta.x/(4 pi |theta|^2) in place of theta.x/(4 |theta|^2) would give max error %.3f",
           literal_gap));
}

void criterion3() {
  ExperimentConfig c;
  c.target = "sine-ridge:1,1";
  c.methods = {"iid"};
  c.m = {16, 32, 64, 128, 256, 512, 1024};
  c.seeds = seeds(20);
  const auto r = rate_sweep(c);
  sweeps.push_back(r);
  const double v = resolve_target(c.target, 2).representation.scale();
  const auto& e = method_fit(r, "iid");
  bool bound_ok = true;
  double worst_ratio = 0.0;
  for (long m : c.m) {
    const double mean = mean_at(e, m, "l2");
    const double bound = 3 * v / std::sqrt(static_cast<double>(m));
    bound_ok = bound_ok && mean <= bound;
    worst_ratio = std::max(worst_ratio, mean / bound);
  }
  const double slope = e["l2"]["slope"].get<double>();
  report(3, bound_ok && slope >= -0.65 && slope <= -0.35 && r.failed == 0,
         fmt("iid on (1,1), m = 16..1024, 20 seeds: mean L2 / (3v/sqrt m) <= %.3f (v = %.4f); slope %.3f in [-0.65, -0.35]",
             worst_ratio, v, slope));
}

void criterion4() {
  ExperimentConfig c;
  c.target = "sine-ridge:1";
  c.methods = {"iid", "stratified-fractional"};
  c.m = {16, 32, 64, 128, 256, 512, 1024};
  c.seeds = seeds(20);
  c.epsilon = "inverse-m";
  const auto r = rate_sweep(c);
  sweeps.push_back(r);
  const auto& iid = method_fit(r, "iid");
  const auto& strat = method_fit(r, "stratified-fractional");
  bool below = true;
  std::string detail;
  for (long m : {64L, 256L, 1024L}) {
    const double a = mean_at(iid, m, "linf"), b = mean_at(strat, m, "linf");
    below = below && b < a;
    detail += fmt(" m=%ld %.2e<%.2e", m, b, a);
  }
  const double s_iid = iid["linf"]["slope"].get<double>();
  const double s_str = strat["linf"]["slope"].get<double>();
  report(4, below && s_str <= s_iid - 0.15 && r.failed == 0,
         fmt("stratified (eps = 1/m) vs iid on (1,), mean Linf:%s; slope %.3f <= %.3f - 0.15", detail.c_str(), s_str,
             s_iid));
  info(fmt("L2 slopes: stratified %.3f, iid %.3f", strat["l2"]["slope"].get<double>(),
           iid["l2"]["slope"].get<double>()));
}

void criterion5() {
  // d = 6 squared-ReLU target with an exact spectral representation
  const SpectralMeasure meas(6, {{{1.0, -0.5, 2.0, 0.3, -1.2, 0.7}, 0.6, 0.4},
                                 {{-0.4, 1.5, 0.2, 2.2, 0.9, -0.6}, 0.3, -1.3},
                                 {{0.8, 0.8, -0.8, 0.8, -0.8, 0.8}, 0.1, 2.0}});
  const auto rep = IntegralRepresentation::from_spectral(meas, 3);
  const auto f = TargetFunction::from_spectral(meas);
  const long m = 256;
  const int runs = 20;
  bool bound_ok = true, shape_ok = true;
  std::string detail, strict;
  double v = 0.0;
  for (int m0 : {4, 16, 64}) {
    double mse = 0.0;
    for (int s = 1; s <= runs; ++s) {
      const auto c = build_sparse(rep, m, m0, f, static_cast<std::uint64_t>(s));
      v = c.v;
      for (const auto& t : c.terms) {
        shape_ok = shape_ok && t.atom.nonzeros() <= static_cast<std::size_t>(m0);
        shape_ok = shape_ok && std::abs(t.atom.l1_norm() - 1.0) <= 1e-12;
      }
      const double e = l2_error(f, c);
      mse += e * e;
    }
    mse /= runs;
    const double rate = 1.0 / m + 1.0 / (static_cast<double>(m0) * m0);
    const double bound = 4 * v * v * rate;
    bound_ok = bound_ok && mse <= bound;
    detail += fmt(" m0=%d %.2e<=%.2e", m0, mse, bound);
    strict += fmt(" m0=%d %.2e", m0, mse / (v * v / 4 * rate * 4));
  }
  report(5, bound_ok && shape_ok,
         fmt("sparse s=3, d=6, m=256, 20 runs: mean sq L2 vs 4v^2(1/m + 1/m0^2):%s; ||a||_0 <= m0 and ||a||_1 = 1 on every term: %s",
             detail.c_str(), shape_ok ? "yes" : "no"));
  info(fmt("same ratio with the per-term scale v/2 in place of v:%s", strict.c_str()));
}

struct AllocationStats {
  std::size_t outside = 0;  // strata with E[m_k] more than 3 SE from m L_k
  double worst = 0.0;       // largest deviation in SE
  long budget_violations = 0;
};

AllocationStats allocation_stats(const StratifiedPlan& plan, long m, std::uint64_t first_seed, int runs) {
  const std::size_t M = plan.stratum_count();
  std::vector<double> sum(M, 0.0), sq(M, 0.0);
  AllocationStats out;
  for (int r = 0; r < runs; ++r) {
    const auto seed = first_seed + static_cast<std::uint64_t>(r);
    const auto a = allocate(plan, m, AllocationMode::Signed, seed);
    for (std::size_t k = 0; k < M; ++k) {
      sum[k] += a.strata[k].allocation;
      sq[k] += a.strata[k].allocation * a.strata[k].allocation;
    }
    if (a.total_samples() > m + static_cast<long>(M)) ++out.budget_violations;
    const auto fr = allocate(plan, m, AllocationMode::Fractional, seed);
    if (fr.total_samples() > m + static_cast<long>(M)) ++out.budget_violations;
  }
  for (std::size_t k = 0; k < M; ++k) {
    const double mean = sum[k] / runs, var = std::max(0.0, sq[k] / runs - mean * mean);
    const double se = std::sqrt(var / runs);
    const double dev = std::abs(mean - m * plan.strata[k].mass);
    if (dev > 3 * se + 1e-12) ++out.outside;
    if (se > 0) out.worst = std::max(out.worst, dev / se);
  }
  return out;
}

void criterion6() {
  const auto rep = IntegralRepresentation::exact_sine({1, 2});
  const auto plan = measure_strata(ParameterPartition(2, 2, 0.5), rep, MassMode::Exact, 1);
  const std::size_t M = plan.stratum_count();
  const long m = 100;
  const auto s = allocation_stats(plan, m, 10000, 10000);
  report(6, s.outside == 0 && s.budget_violations == 0,
         fmt("10^4 signed allocations over M = %zu strata: E[m_k] within 3 SE on %zu/%zu (max %.2f SE); sum n_k > m + M in %ld of 2*10^4 allocations",
             M, M - s.outside, M, s.worst, s.budget_violations));
  const auto big = allocation_stats(plan, m, 0, 1000000);
  info(fmt("10^6 allocations: max deviation %.2f SE, budget exceeded %ld times", big.worst, big.budget_violations));
}

void criterion7() {
  const auto checks = verify_suite("sine-family", 1);
  std::string detail;
  for (const auto& c : checks) detail += fmt(" %s=%.1e", c.check.c_str(), c.value);
  report(7, all_pass(checks), "sine family R <= 4, d <= 2:" + detail);
}

void criterion8() {
  const auto fam = sine_family(4, 2);
  const auto need = static_cast<std::size_t>(std::ceil(packing_cardinality(fam.size())));
  const auto p = select_packing(fam, need, 1);
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.codewords.size(); ++i)
    for (std::size_t j = i + 1; j < p.codewords.size(); ++j)
      min_d = std::min(min_d, pairwise_distance(fam, p.codewords[i], p.codewords[j]));
  const double bound = 0.5 * fam.min_norm() / std::sqrt(16.0);
  report(8, fam.size() == 16 && p.codewords.size() >= 4 && min_d >= bound,
         fmt("|H| = 16: |Omega| = %zu >= 4 (2^{(1-H(1/4))16-1} = %.3f); min distance %.4e >= %.4e", p.codewords.size(),
             packing_cardinality(16), min_d, bound));
}

void criterion9() {
  ExperimentConfig c;
  c.target = "sine-ridge:1,2";
  c.order = 3;
  c.methods = {"iid", "iid-simplified", "sparse", "stratified-signed"};
  c.m = {16, 64, 256};
  c.seeds = seeds(10);
  c.m0 = 1;
  sweeps.push_back(rate_sweep(c));
  std::size_t rows = 0, violations = 0;
  bool ok = true;
  for (const auto& r : sweeps) {
    std::size_t v = 0;
    ok = floor_holds(r, v) && ok;
    violations += v;
    rows += r.rows.size();
  }
  double tightest = std::numeric_limits<double>::infinity();
  for (const auto& r : sweeps)
    for (const auto& row : r.rows) tightest = std::min(tightest, row.report.l2 / row.floor);
  report(9, ok, fmt("%zu sweeps, %zu rows: %zu below the A = 1 floor (smallest error/floor ratio %.3g)", sweeps.size(),
                    rows, violations, tightest));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion10() {
  const auto root = fs::temp_directory_path() / ("ridgeapprox-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  ExperimentConfig b;
  b.target = "sine-ridge:1,1";
  b.methods = {"stratified-signed"};
  b.m = {128};
  b.seeds = {7};
  ExperimentConfig s;
  s.target = "sine-ridge:2";
  s.methods = {"iid", "sparse", "stratified-fractional"};
  s.m = {16, 32, 64};
  s.seeds = seeds(10);
  std::size_t compared = 0, equal = 0;
  bool ran = true;
  for (const char* run : {"a", "b"}) {
    b.out = root / (std::string("build-") + run);
    s.out = root / (std::string("sweep-") + run);
    ran = run_build(b) == kExitOk && ran;
    ran = run_rate_sweep(s) == kExitOk && ran;
  }
  for (const char* f : {"combination.json", "report.csv", "manifest.json"}) {
    ++compared;
    equal += slurp(root / "build-a" / f) == slurp(root / "build-b" / f) && fs::file_size(root / "build-a" / f) > 0;
  }
  for (const char* f : {"results.csv", "fits.json", "manifest.json"}) {
    ++compared;
    equal += slurp(root / "sweep-a" / f) == slurp(root / "sweep-b" / f) && fs::file_size(root / "sweep-a" / f) > 0;
  }
  fs::remove_all(root);
  report(10, ran && equal == compared,
         fmt("build and rate-sweep run twice: %zu/%zu output files byte-identical", equal, compared));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                               criterion6, criterion7, criterion8, criterion9, criterion10};
  for (std::size_t i = 0; i < all.size(); ++i) {
    try {
      all[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("error: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, all.size());
  return failures == 0 ? 0 : 1;
}
