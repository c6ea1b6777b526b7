#include "ridgeapprox/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "ridgeapprox/errors.hpp"

namespace ridge {

namespace {

constexpr std::uint64_t kIidStream = 0x11d;
constexpr std::uint64_t kMassStream = 0x3a55;
constexpr std::uint64_t kAllocStream = 0xa110c;
constexpr std::uint64_t kStratumStream = 0x57a7;
constexpr std::uint64_t kSparsifyStream = 0x5ba5;
constexpr std::uint64_t kSparseBuildStream = 0x5b11d;
constexpr std::uint64_t kMaxStrata = 50'000'000;

long ceil_count(double x) {
  // 1/(eps/4) for eps = 1/2 must give exactly 8 bins.
  return std::max(1L, static_cast<long>(std::ceil(x - 1e-9)));
}

void attach_correction(RidgeCombination& c, const TargetFunction& target,
                       int order) {
  if (target.dim != c.dim) throw UsageError("target and representation dimensions differ");
  if (!target.b0 || !target.a0)
    throw UsageError("target must provide its value and gradient at the origin");
  c.b0 = *target.b0;
  c.a0 = *target.a0;
  if (order == 3) {
    if (!target.A0) throw UsageError("order-3 build needs the target's Hessian at the origin");
    c.A0 = *target.A0;
  }
}

RidgeCombination empty_combination(const IntegralRepresentation& rep,
                                   const TargetFunction& target) {
  RidgeCombination c = RidgeCombination::affine(rep.dim(), rep.order(), 0.0, {});
  attach_correction(c, target, rep.order());
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

ParameterPartition::ParameterPartition(int dim, int order, double epsilon)
    : dim_(dim), order_(order), epsilon_(epsilon) {
  if (dim < 1) throw UsageError("partition: dimension must be positive");
  if (order != 2 && order != 3) throw UsageError("partition: order must be 2 or 3");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw UsageError("partition: epsilon must be positive");
  if (epsilon > 3.0) {
    degenerate_ = true;
    count_ = 1;
    return;
  }
  // Threshold bins take a quarter of the budget and magnitude cells at most
  // half; squared ReLU halves both to absorb its Lipschitz factor 2.
  const double factor = order == 3 ? 0.5 : 1.0;
  t_width_ = factor * epsilon / 4.0;
  t_bins_ = ceil_count(1.0 / t_width_);
  if (dim >= 2) {
    mesh_ = std::min(factor * epsilon / 4.0, factor * epsilon / (4.0 * (dim - 1)));
    cells_per_axis_ = ceil_count(1.0 / mesh_);
  }
  dense_cells_ = 1;
  for (int i = 0; i + 1 < dim; ++i) {
    dense_cells_ *= static_cast<std::uint64_t>(cells_per_axis_);
    if (dense_cells_ > kMaxStrata) throw UsageError("partition: too many strata for this epsilon");
  }
  feasible_cells_ = 0;
  for (std::uint64_t cell = 0; cell < dense_cells_; ++cell)
    if (feasible_cell(cell)) ++feasible_cells_;
  count_ = 2ULL * static_cast<std::uint64_t>(t_bins_) * (1ULL << dim) * feasible_cells_;
  if (count_ > kMaxStrata) throw UsageError("partition: too many strata for this epsilon");
}

bool ParameterPartition::feasible_cell(std::uint64_t cell) const {
  std::uint64_t rem = cell;
  long sum = 0;
  for (int i = 0; i + 1 < dim_; ++i) {
    sum += static_cast<long>(rem % static_cast<std::uint64_t>(cells_per_axis_));
    rem /= static_cast<std::uint64_t>(cells_per_axis_);
  }
  return static_cast<double>(sum) * mesh_ <= 1.0 + 1e-12;
}

long ParameterPartition::t_bin(double t) const {
  if (degenerate_) return 0;
  const long b = static_cast<long>(std::floor(t / t_width_));
  return std::clamp(b, 0L, t_bins_ - 1);
}

double ParameterPartition::bin_lo(long bin) const {
  return degenerate_ ? 0.0 : static_cast<double>(bin) * t_width_;
}

double ParameterPartition::bin_hi(long bin) const {
  if (degenerate_ || bin >= t_bins_ - 1) return 1.0;
  return static_cast<double>(bin + 1) * t_width_;
}

std::uint64_t ParameterPartition::direction_key(std::span<const double> a) const {
  if (static_cast<int>(a.size()) != dim_) throw UsageError("partition: dimension mismatch");
  if (degenerate_) return 0;
  std::uint64_t orthant = 0;
  double norm = 0.0;
  for (int i = 0; i < dim_; ++i) {
    if (a[static_cast<std::size_t>(i)] < 0.0) orthant |= (1ULL << i);
    norm += std::abs(a[static_cast<std::size_t>(i)]);
  }
  std::uint64_t cell = 0, stride = 1;
  for (int i = 0; i + 1 < dim_; ++i) {
    const double p = norm > 0.0 ? std::abs(a[static_cast<std::size_t>(i)]) / norm : 0.0;
    const long k = std::clamp(static_cast<long>(std::floor(p / mesh_)), 0L, cells_per_axis_ - 1);
    cell += static_cast<std::uint64_t>(k) * stride;
    stride *= static_cast<std::uint64_t>(cells_per_axis_);
  }
  return orthant * dense_cells_ + cell;
}

std::uint64_t ParameterPartition::compose(int eta, long t_bin,
                                          std::uint64_t direction) const {
  if (degenerate_) return 0;
  const std::uint64_t eta_index = eta > 0 ? 0 : 1;
  const std::uint64_t per_bin = (1ULL << dim_) * dense_cells_;
  return (eta_index * static_cast<std::uint64_t>(t_bins_) + static_cast<std::uint64_t>(t_bin)) *
             per_bin + direction;
}

std::uint64_t ParameterPartition::locate(int eta, double t,
                                         std::span<const double> a) const {
  return compose(eta, t_bin(t), direction_key(a));
}

std::vector<std::uint64_t> ParameterPartition::enumerate() const {
  if (degenerate_) return {0};
  std::vector<std::uint64_t> ids;
  ids.reserve(count_);
  const std::uint64_t orthants = 1ULL << dim_;
  for (int eta : {1, -1})
    for (long b = 0; b < t_bins_; ++b)
      for (std::uint64_t o = 0; o < orthants; ++o)
        for (std::uint64_t cell = 0; cell < dense_cells_; ++cell)
          if (feasible_cell(cell)) ids.push_back(compose(eta, b, o * dense_cells_ + cell));
  return ids;
}

RidgeAtom ParameterPartition::representative(std::uint64_t id) const {
  RidgeAtom atom;
  atom.order = order_;
  atom.a.assign(static_cast<std::size_t>(dim_), 0.0);
  if (degenerate_) {
    atom.a[0] = 1.0;
    return atom;
  }
  const std::uint64_t per_bin = (1ULL << dim_) * dense_cells_;
  const std::uint64_t direction = id % per_bin;
  const std::uint64_t bin_index = id / per_bin;
  const long bin = static_cast<long>(bin_index % static_cast<std::uint64_t>(t_bins_));
  atom.sign = bin_index / static_cast<std::uint64_t>(t_bins_) == 0 ? 1 : -1;
  atom.t = std::min(1.0, (static_cast<double>(bin) + 0.5) * t_width_);

  const std::uint64_t orthant = direction / dense_cells_;
  std::uint64_t cell = direction % dense_cells_;
  double used = 0.0;
  for (int i = 0; i + 1 < dim_; ++i) {
    const auto k = cell % static_cast<std::uint64_t>(cells_per_axis_);
    cell /= static_cast<std::uint64_t>(cells_per_axis_);
    atom.a[static_cast<std::size_t>(i)] = static_cast<double>(k) * mesh_;
    used += atom.a[static_cast<std::size_t>(i)];
  }
  atom.a[static_cast<std::size_t>(dim_ - 1)] = std::max(0.0, 1.0 - used);
  const double norm = atom.l1_norm();
  for (int i = 0; i < dim_; ++i) {
    auto& ai = atom.a[static_cast<std::size_t>(i)];
    ai /= norm;
    if (orthant & (1ULL << i)) ai = -ai;
  }
  return atom;
}

// ---------------------------------------------------------------------------

double StratifiedPlan::total_mass() const {
  double s = 0.0;
  for (const auto& st : strata) s += st.mass;
  return s;
}

long StratifiedPlan::total_samples() const {
  long s = 0;
  for (const auto& st : strata) s += st.sample_size;
  return s;
}

StratifiedPlan partition_parameters(int dim, int order, double epsilon) {
  const ParameterPartition partition(dim, order, epsilon);
  StratifiedPlan plan;
  plan.epsilon = epsilon;
  plan.dim = dim;
  plan.order = order;
  for (std::uint64_t id : partition.enumerate()) {
    Stratum st;
    st.id = id;
    st.representative = partition.representative(id);
    plan.strata.push_back(std::move(st));
  }
  return plan;
}

StratifiedPlan measure_strata(const ParameterPartition& partition,
                              const IntegralRepresentation& rep, MassMode mode,
                              std::uint64_t seed) {
  if (partition.dim() != rep.dim() || partition.order() != rep.order())
    throw UsageError("partition and representation disagree on dimension or order");
  StratifiedPlan plan;
  plan.epsilon = partition.epsilon();
  plan.dim = rep.dim();
  plan.order = rep.order();
  plan.mass_mode = mode;
  if (rep.pieces().empty() || !(rep.scale() > 0.0)) return plan;

  std::map<std::uint64_t, Stratum> acc;
  if (mode == MassMode::Exact) {
    std::vector<std::uint64_t> directions;
    for (const auto& comp : rep.components()) directions.push_back(partition.direction_key(comp.a));
    for (const auto& piece : rep.pieces()) {
      const auto direction = directions[static_cast<std::size_t>(piece.component)];
      const long first = partition.t_bin(piece.t0);
      const long last = partition.t_bin(piece.t1);
      for (long b = first; b <= last; ++b) {
        const double lo = partition.bin_lo(b), hi = partition.bin_hi(b);
        const double m = rep.piece_mass(piece, lo, hi);
        if (!(m > 0.0)) continue;
        DensityPiece sub = piece;
        sub.t0 = std::max(piece.t0, lo);
        sub.t1 = std::min(piece.t1, hi);
        sub.mass = m;
        auto& st = acc[partition.compose(piece.eta, b, direction)];
        st.mass += m;
        st.pieces.push_back(sub);
      }
    }
  } else {
    const std::size_t draws = static_cast<std::size_t>(
        std::max<std::uint64_t>(10'000, 100 * partition.stratum_count()));
    plan.mass_draws = draws;
    CounterRng rng(seed, kMassStream);
    for (std::size_t i = 0; i < draws; ++i) {
      const std::uint64_t pos = rng.position();
      const RidgeAtom atom = rep.draw(rng);
      auto& st = acc[partition.locate(atom)];
      st.draw_positions.push_back(pos);
      st.mass += 1.0;
    }
  }

  double total = 0.0;
  for (const auto& [id, st] : acc) total += st.mass;
  for (auto& [id, st] : acc) {
    st.id = id;
    st.mass /= total;
    st.representative = partition.representative(id);
    plan.strata.push_back(std::move(st));
  }
  return plan;
}

StratifiedPlan allocate(StratifiedPlan plan, long m, AllocationMode mode,
                        std::uint64_t seed) {
  if (m < 1) throw UsageError("allocate: m must be at least 1");
  if (plan.strata.empty()) throw UsageError("allocate: plan has no strata");
  double total = 0.0;
  for (const auto& st : plan.strata) {
    if (!(st.mass >= 0.0)) throw UsageError("allocate: negative stratum mass");
    total += st.mass;
  }
  if (std::abs(total - 1.0) > 1e-9) throw UsageError("allocate: stratum masses are not normalized");

  CounterRng rng(seed, kAllocStream);
  for (auto& st : plan.strata) {
    const double target = static_cast<double>(m) * st.mass;
    if (mode == AllocationMode::Signed) {
      const double lo = std::floor(target);
      const double u = rng.uniform();
      st.allocation = lo + (u < target - lo ? 1.0 : 0.0);
      st.sample_size = static_cast<long>(st.allocation) + (st.allocation == 0.0 ? 1 : 0);
    } else {
      st.allocation = target;
      st.sample_size = static_cast<long>(std::ceil(target));
    }
  }
  plan.allocated = true;
  plan.mode = mode;
  plan.budget = m;
  return plan;
}

double default_epsilon(long m, int dim, AllocationMode mode) {
  if (m < 1) throw UsageError("default_epsilon: m must be at least 1");
  const double exponent = mode == AllocationMode::Signed ? 1.0 / (dim + 2) : 1.0 / dim;
  return std::pow(static_cast<double>(m), -exponent);
}

// ---------------------------------------------------------------------------

RidgeCombination build_iid(const IntegralRepresentation& rep, long m,
                           const TargetFunction& target, std::uint64_t seed) {
  if (m < 1) throw UsageError("build_iid: m must be at least 1");
  RidgeCombination c = empty_combination(rep, target);
  if (!(rep.scale() > 0.0)) return c;
  c.v = rep.scale();
  CounterRng rng(seed, kIidStream);
  c.terms.reserve(static_cast<std::size_t>(m));
  for (long k = 0; k < m; ++k) {
    RidgeTerm term;
    term.atom = rep.draw(rng);
    term.b = term.atom.sign;
    c.terms.push_back(std::move(term));
  }
  return c;
}

RidgeCombination build_iid_simplified(const SpectralMeasure& meas, int order,
                                      long m, const TargetFunction& target,
                                      std::uint64_t seed) {
  if (m < 1) throw UsageError("build_iid_simplified: m must be at least 1");
  RidgeCombination c = RidgeCombination::affine(meas.dim(), order, 0.0, {});
  attach_correction(c, target, order);
  auto sample = sample_atom_simplified(meas, order, static_cast<std::size_t>(m), seed);
  c.v = sample.v;
  c.terms = std::move(sample.terms);
  return c;
}

StratifiedBuild build_stratified_detailed(const IntegralRepresentation& rep,
                                          long m, double epsilon,
                                          AllocationMode mode,
                                          const TargetFunction& target,
                                          std::uint64_t seed,
                                          const StratifiedOptions& options) {
  if (m < 1) throw UsageError("build_stratified: m must be at least 1");
  StratifiedBuild out;
  out.combination = empty_combination(rep, target);
  const ParameterPartition partition(rep.dim(), rep.order(), epsilon);
  StratifiedPlan plan = measure_strata(partition, rep, options.mass_mode, seed);
  if (plan.strata.empty()) {
    out.plan = std::move(plan);
    return out;
  }
  plan = allocate(std::move(plan), m, mode, seed);

  const bool fractional = mode == AllocationMode::Fractional;
  std::vector<long> wanted(plan.strata.size());
  for (std::size_t k = 0; k < plan.strata.size(); ++k) {
    const auto& st = plan.strata[k];
    wanted[k] = fractional ? st.sample_size : static_cast<long>(st.allocation);
  }

  // Conditional draws from P_k, by stratum.
  std::vector<std::vector<RidgeAtom>> draws(plan.strata.size());
  if (options.mass_mode == MassMode::Exact) {
    for (std::size_t k = 0; k < plan.strata.size(); ++k) {
      const auto& st = plan.strata[k];
      std::vector<double> cumulative;
      double run = 0.0;
      for (const auto& p : st.pieces) cumulative.push_back(run += p.mass);
      CounterRng rng = CounterRng(seed, kStratumStream).substream(st.id);
      for (long j = 0; j < wanted[k]; ++j) {
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), rng.uniform() * run);
        if (it == cumulative.end()) --it;
        const auto& p = st.pieces[static_cast<std::size_t>(it - cumulative.begin())];
        draws[k].push_back(rep.atom_for(p, rep.invert_piece(p, p.t0, p.t1, rng.uniform())));
      }
    }
  } else {
    // Rejection against stratum membership along the mass-estimation stream:
    // the first n_k draws of the stream landing in stratum k.
    CounterRng replay(seed, kMassStream);
    std::map<std::uint64_t, std::size_t> index_of;
    std::vector<std::uint64_t> last_accept(plan.strata.size(), 0);
    std::size_t short_strata = 0;
    std::vector<std::size_t> pending;
    for (std::size_t k = 0; k < plan.strata.size(); ++k) {
      index_of[plan.strata[k].id] = k;
      const auto& positions = plan.strata[k].draw_positions;
      const std::size_t take = std::min<std::size_t>(positions.size(), static_cast<std::size_t>(wanted[k]));
      for (std::size_t j = 0; j < take; ++j) {
        replay.seek(positions[j]);
        draws[k].push_back(rep.draw(replay));
      }
      if (static_cast<long>(draws[k].size()) < wanted[k]) {
        ++short_strata;
        pending.push_back(k);
      }
    }
    if (short_strata > 0) {
      CounterRng rng(seed, kMassStream);
      for (std::size_t i = 0; i < plan.mass_draws; ++i) rep.draw(rng);
      const std::uint64_t start = plan.mass_draws;
      std::fill(last_accept.begin(), last_accept.end(), start);
      for (std::uint64_t n = start; short_strata > 0; ++n) {
        const RidgeAtom atom = rep.draw(rng);
        auto it = index_of.find(partition.locate(atom));
        if (it != index_of.end()) {
          const std::size_t k = it->second;
          if (static_cast<long>(draws[k].size()) < wanted[k]) {
            draws[k].push_back(atom);
            last_accept[k] = n;
            if (static_cast<long>(draws[k].size()) == wanted[k]) --short_strata;
          }
        }
        for (std::size_t k : pending) {
          if (static_cast<long>(draws[k].size()) < wanted[k] &&
              n - last_accept[k] > options.retry_budget) {
            throw BuildFailure("stratum " + std::to_string(plan.strata[k].id) +
                               " accepted no draw within the retry budget");
          }
        }
      }
    }
  }

  auto& c = out.combination;
  out.stratum_terms.resize(plan.strata.size());
  for (std::size_t k = 0; k < plan.strata.size(); ++k) {
    const auto& st = plan.strata[k];
    const double weight = fractional ? st.allocation / static_cast<double>(st.sample_size) : 1.0;
    for (auto& atom : draws[k]) {
      RidgeTerm term;
      term.b = atom.sign * std::min(weight, 1.0);
      term.atom = std::move(atom);
      out.stratum_terms[k].push_back(c.terms.size());
      c.terms.push_back(std::move(term));
    }
  }
  // f_k = (v m_k)/(m n_k) sum_j h_jk: the combination divides by its own term
  // count, so the stored scale is v * terms / m.
  c.v = c.terms.empty() ? 0.0
                        : rep.scale() * static_cast<double>(c.terms.size()) / static_cast<double>(m);
  for (auto& st : plan.strata) st.draw_positions.clear();
  out.plan = std::move(plan);
  return out;
}

RidgeCombination build_stratified(const IntegralRepresentation& rep, long m,
                                  double epsilon, AllocationMode mode,
                                  const TargetFunction& target,
                                  std::uint64_t seed,
                                  const StratifiedOptions& options) {
  return build_stratified_detailed(rep, m, epsilon, mode, target, seed, options).combination;
}

// ---------------------------------------------------------------------------

std::pair<std::size_t, int> draw_signed_basis(std::span<const double> a,
                                              CounterRng& rng) {
  double total = 0.0;
  for (double ai : a) total += std::abs(ai);
  const double u = rng.uniform() * total;
  double run = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] == 0.0) continue;
    last_nonzero = j;
    run += std::abs(a[j]);
    if (u < run) return {j, a[j] < 0.0 ? -1 : 1};
  }
  return {last_nonzero, a[last_nonzero] < 0.0 ? -1 : 1};
}

RidgeCombination sparsify(const RidgeCombination& c, const SparsifierConfig& cfg) {
  if (cfg.m0 < 1) throw UsageError("sparsify: m0 must be at least 1");
  RidgeCombination out = c;
  const CounterRng base(cfg.seed, kSparsifyStream);
  std::vector<int> counts;
  for (std::size_t k = 0; k < out.terms.size(); ++k) {
    auto& a = out.terms[k].atom.a;
    if (std::abs(out.terms[k].atom.l1_norm() - 1.0) > 1e-12)
      throw UsageError("sparsify: inner vector " + std::to_string(k) + " does not have unit l1 norm");
    CounterRng rng = base.substream(k);
    counts.assign(a.size(), 0);
    std::vector<int> signs(a.size(), 1);
    for (int l = 0; l < cfg.m0; ++l) {
      const auto [j, sgn] = draw_signed_basis(a, rng);
      ++counts[j];
      signs[j] = sgn;
    }
    for (std::size_t j = 0; j < a.size(); ++j)
      a[j] = counts[j] == 0 ? 0.0 : signs[j] * static_cast<double>(counts[j]) / cfg.m0;
  }
  return out;
}

RidgeCombination build_sparse(const IntegralRepresentation& rep, long m, int m0,
                              const TargetFunction& target, std::uint64_t seed) {
  if (m0 < 1) throw UsageError("build_sparse: m0 must be at least 1");
  const RidgeCombination dense = build_iid(rep, m, target, seed);
  return sparsify(dense, SparsifierConfig{m0, CounterRng(seed, kSparseBuildStream).next_u64()});
}

}  // namespace ridge
