#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ridgeapprox/ridge.hpp"
#include "ridgeapprox/spectral.hpp"

namespace ridge {

enum class AllocationMode { Signed, Fractional };
enum class MassMode { Exact, Estimated };

/// Partition of {eta} x [0, 1] x {||a||_1 = 1} into cells of
/// atom_sup_distance diameter < epsilon: eta sign, a threshold bin, an
/// orthant of a, and a cell of a grid on the magnitudes |a| / ||a||_1.
/// Bins are half-open [lo, hi); the last bin on each axis is closed.
class ParameterPartition {
 public:
  ParameterPartition(int dim, int order, double epsilon);

  int dim() const { return dim_; }
  int order() const { return order_; }
  double epsilon() const { return epsilon_; }
  /// epsilon > 3: the whole parameter space is one stratum.
  bool degenerate() const { return degenerate_; }

  double t_width() const { return t_width_; }
  long t_bins() const { return t_bins_; }
  double mesh() const { return mesh_; }
  long mesh_cells_per_axis() const { return cells_per_axis_; }

  /// M, the number of nonempty (simplex-feasible) cells.
  std::uint64_t stratum_count() const { return count_; }

  std::uint64_t locate(int eta, double t, std::span<const double> a) const;
  std::uint64_t locate(const RidgeAtom& atom) const {
    return locate(atom.sign, atom.t, atom.a);
  }
  /// Threshold bin of t and its [lo, hi) edges.
  long t_bin(double t) const;
  double bin_lo(long bin) const;
  double bin_hi(long bin) const;
  /// Index of the direction part (orthant and magnitude cell) of a stratum id.
  std::uint64_t direction_key(std::span<const double> a) const;
  std::uint64_t compose(int eta, long t_bin, std::uint64_t direction) const;

  /// Every stratum id with a point of the sphere in it, ascending.
  std::vector<std::uint64_t> enumerate() const;
  /// A nominal atom for the cell (its lower corner), for reporting.
  RidgeAtom representative(std::uint64_t id) const;

 private:
  bool feasible_cell(std::uint64_t cell) const;

  int dim_;
  int order_;
  double epsilon_;
  bool degenerate_ = false;
  double t_width_ = 1.0;
  long t_bins_ = 1;
  double mesh_ = 1.0;
  long cells_per_axis_ = 1;
  std::uint64_t dense_cells_ = 1;  // cells_per_axis^(d-1)
  std::uint64_t feasible_cells_ = 1;
  std::uint64_t count_ = 1;
};

struct Stratum {
  std::uint64_t id = 0;
  RidgeAtom representative;
  double mass = 0.0;        // L_k
  double allocation = 0.0;  // m_k (integer-valued in signed mode)
  long sample_size = 0;     // n_k
  /// Exact mode: the representation's density restricted to this stratum.
  std::vector<DensityPiece> pieces;
  /// Estimated mode: stream positions of the mass-estimation draws that fell
  /// into this stratum, in draw order.
  std::vector<std::uint64_t> draw_positions;
};

struct StratifiedPlan {
  double epsilon = 1.0;
  int dim = 1;
  int order = 2;
  MassMode mass_mode = MassMode::Exact;
  std::size_t mass_draws = 0;  // estimated mode only
  std::vector<Stratum> strata;
  bool allocated = false;
  AllocationMode mode = AllocationMode::Fractional;
  long budget = 0;  // m

  std::size_t stratum_count() const { return strata.size(); }
  double total_mass() const;
  long total_samples() const;  // sum n_k
};

/// Skeleton plan: every stratum of the partition with zero mass.
StratifiedPlan partition_parameters(int dim, int order, double epsilon);

/// Plan with masses L_k of rep on the partition; empty strata are dropped.
/// Exact mode integrates the representation's t-density over each cell;
/// estimated mode bins N = max(1e4, 100 M) draws.
StratifiedPlan measure_strata(const ParameterPartition& partition,
                              const IntegralRepresentation& rep, MassMode mode,
                              std::uint64_t seed);

/// Proportionate allocation. Signed: m_k is the randomized rounding of m L_k
/// and n_k = m_k + 1{m_k = 0}. Fractional: m_k = m L_k and n_k = ceil(m_k).
StratifiedPlan allocate(StratifiedPlan plan, long m, AllocationMode mode,
                        std::uint64_t seed);

struct StratifiedOptions {
  MassMode mass_mode = MassMode::Exact;
  /// Consecutive rejected draws a stratum may see before the build fails
  /// (estimated mode only).
  std::uint64_t retry_budget = 1'000'000;
};

struct StratifiedBuild {
  RidgeCombination combination;
  StratifiedPlan plan;
  /// Term indices belonging to each stratum of plan.strata, in order.
  std::vector<std::vector<std::size_t>> stratum_terms;
};

/// Equal-weight combination of m i.i.d. atoms from rep with the target's
/// affine (s = 2) or quadratic (s = 3) correction attached.
RidgeCombination build_iid(const IntegralRepresentation& rep, long m,
                           const TargetFunction& target, std::uint64_t seed);

/// i.i.d. build on the simplified density (t uniform, sinusoid folded into b).
RidgeCombination build_iid_simplified(const SpectralMeasure& meas, int order,
                                      long m, const TargetFunction& target,
                                      std::uint64_t seed);

StratifiedBuild build_stratified_detailed(const IntegralRepresentation& rep,
                                          long m, double epsilon,
                                          AllocationMode mode,
                                          const TargetFunction& target,
                                          std::uint64_t seed,
                                          const StratifiedOptions& options = {});

RidgeCombination build_stratified(const IntegralRepresentation& rep, long m,
                                  double epsilon, AllocationMode mode,
                                  const TargetFunction& target,
                                  std::uint64_t seed,
                                  const StratifiedOptions& options = {});

/// Default epsilon schedule: m^{-1/(d+2)} (signed) or m^{-1/d} (fractional).
double default_epsilon(long m, int dim, AllocationMode mode);

struct SparsifierConfig {
  int m0 = 1;
  std::uint64_t seed = 0;
};

/// One signed basis vector sgn(a_j) e_j drawn with probability |a_j|;
/// returns the coordinate index and its sign.
std::pair<std::size_t, int> draw_signed_basis(std::span<const double> a,
                                              CounterRng& rng);

/// Replaces every inner vector a_k by the mean of m0 i.i.d. signed basis
/// vectors; ||a||_0 <= m0 and ||a||_1 = 1 afterwards. Everything else is
/// copied unchanged.
RidgeCombination sparsify(const RidgeCombination& c, const SparsifierConfig& cfg);

/// build_iid followed by sparsify with m0.
RidgeCombination build_sparse(const IntegralRepresentation& rep, long m, int m0,
                              const TargetFunction& target, std::uint64_t seed);

}  // namespace ridge
