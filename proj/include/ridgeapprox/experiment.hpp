#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ridgeapprox/construct.hpp"
#include "ridgeapprox/io.hpp"
#include "ridgeapprox/metrics.hpp"
#include "ridgeapprox/spectral.hpp"

namespace ridge {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitBuild = 3 };

/// Methods: iid, iid-simplified, stratified-signed, stratified-fractional,
/// sparse. Epsilon schedule: "default", "inverse-m" or a positive number.
struct ExperimentConfig {
  std::string target = "sine-ridge:1";
  std::vector<std::string> methods{"iid"};
  std::vector<long> m{16};
  std::vector<std::uint64_t> seeds{1};
  int order = 2;
  std::string epsilon = "default";
  int m0 = 4;
  std::string mass_mode = "exact";
  int quad_nodes = 0;
  int grid_resolution = 0;
  int threads = 0;  // 0 = hardware concurrency
  bool allow_large = false;
  std::filesystem::path out = "out";

  /// Throws UsageError on any invariant violation (m strictly increasing,
  /// seeds nonempty, s in {2, 3}, desk-scale envelope unless allow_large).
  void validate() const;
  /// Canonical form used for the config hash; omits out and threads.
  io::Json to_json() const;
  static ExperimentConfig from_json(const io::Json& j);
};

/// FNV-1a 64-bit over the canonical config JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// A resolved target: the function, its representation at order s, and its
/// spectral measure when one exists.
struct ResolvedTarget {
  std::string name;
  TargetFunction function;
  IntegralRepresentation representation;
  std::optional<SpectralMeasure> measure;
};

/// "sine-ridge:1,2", "sine-ridge:(1,2)" or "cosine-sum:<file>".
ResolvedTarget resolve_target(const std::string& spec, int order);

/// Builds one approximant; BuildFailure and UsageError propagate.
RidgeCombination build_method(const ResolvedTarget& target, const std::string& method,
                              long m, std::uint64_t seed, const ExperimentConfig& cfg);

struct SweepRow {
  ErrorReport report;
  double floor = 0.0;
  std::string status = "ok";
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by method, m, seed
  io::Json fits;
  std::string hash;
  std::size_t failed = 0;
  std::size_t floor_violations = 0;
};

/// Runs every (method, m, seed) cell in a work pool. No files written.
SweepResult rate_sweep(const ExperimentConfig& cfg);

std::string results_csv_header();
std::string results_csv(const SweepResult& r);

/// Subcommands. Each writes its files under cfg.out and returns an exit code.
int run_build(const ExperimentConfig& cfg);
int run_rate_sweep(const ExperimentConfig& cfg);

struct CheckResult {
  std::string check;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// which: identities, sine-family, packing, sampler-fit.
std::vector<CheckResult> verify_suite(const std::string& which, std::uint64_t seed = 1);
io::Json to_json(const std::vector<CheckResult>& checks);
int run_verify(const std::string& which, std::uint64_t seed,
               const std::optional<std::filesystem::path>& out);

/// Catalog of target names with a one-line description each.
std::vector<std::pair<std::string, std::string>> catalog();

}  // namespace ridge
