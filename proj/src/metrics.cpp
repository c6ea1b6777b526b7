#include "ridgeapprox/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

#include "ridgeapprox/errors.hpp"
#include "ridgeapprox/quadrature.hpp"
#include "ridgeapprox/rng.hpp"

namespace ridge {

namespace {

std::shared_ptr<const quad::Cubature> cubature_for(int dim, const QuadratureSpec& spec) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::size_t>, std::shared_ptr<const quad::Cubature>> cache;
  int n = spec.nodes_per_axis;
  if (n == 0) n = dim <= 3 ? 64 : (dim == 4 ? 24 : 0);
  const std::pair<int, std::size_t> key{dim, n > 0 ? static_cast<std::size_t>(n) : spec.halton_points + (1ULL << 40)};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto cub = std::make_shared<const quad::Cubature>(
      n > 0 ? quad::tensor_gauss(dim, n) : quad::halton(dim, spec.halton_points));
  cache.emplace(key, cub);
  return cub;
}

PointCloud make_grid(int dim, const GridSpec& spec) {
  int r = spec.resolution;
  if (r == 0) r = dim == 1 ? 2048 : dim == 2 ? 256 : dim == 3 ? 64 : 16;
  if (r < 2) throw UsageError("grid resolution must be at least 2");
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(r);
  const std::size_t extra = dim >= 4 ? spec.random_points : 0;

  PointCloud grid;
  grid.dim = dim;
  grid.coords.assign(static_cast<std::size_t>(dim), std::vector<double>(total + extra));
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rem = p;
    for (int i = 0; i < dim; ++i) {
      const auto k = rem % static_cast<std::size_t>(r);
      rem /= static_cast<std::size_t>(r);
      grid.coords[static_cast<std::size_t>(i)][p] = -1.0 + 2.0 * static_cast<double>(k) / (r - 1);
    }
  }
  CounterRng rng(spec.seed);
  for (std::size_t p = total; p < total + extra; ++p)
    for (int i = 0; i < dim; ++i) grid.coords[static_cast<std::size_t>(i)][p] = 2.0 * rng.uniform() - 1.0;
  return grid;
}

double grid_step(int dim, const GridSpec& spec) {
  int r = spec.resolution;
  if (r == 0) r = dim == 1 ? 2048 : dim == 2 ? 256 : dim == 3 ? 64 : 16;
  return 2.0 / (r - 1);
}

// Golden-section maximization of |err| along each axis around the largest
// grid deviations. Returns the best value seen, never below the grid max.
double refine(const std::function<double(std::span<const double>)>& err,
              const PointCloud& grid, const std::vector<double>& grid_err,
              double step, int cells) {
  std::vector<std::size_t> order(grid_err.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(std::max(cells, 0)), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(),
                    [&](std::size_t a, std::size_t b) { return grid_err[a] > grid_err[b]; });
  double best = grid_err.empty() ? 0.0 : *std::max_element(grid_err.begin(), grid_err.end());
  constexpr double kInvPhi = 0.6180339887498949;
  for (std::size_t c = 0; c < top; ++c) {
    std::vector<double> x = grid.point(order[c]);
    double fx = grid_err[order[c]];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        double lo = std::max(-1.0, x[i] - step), hi = std::min(1.0, x[i] + step);
        auto at = [&](double xi) {
          std::vector<double> y = x;
          y[i] = xi;
          return err(y);
        };
        double p = hi - kInvPhi * (hi - lo), q = lo + kInvPhi * (hi - lo);
        double fp = at(p), fq = at(q);
        for (int it = 0; it < 40; ++it) {
          if (fp >= fq) {
            hi = q; q = p; fq = fp;
            p = hi - kInvPhi * (hi - lo); fp = at(p);
          } else {
            lo = p; p = q; fp = fq;
            q = lo + kInvPhi * (hi - lo); fq = at(q);
          }
        }
        for (auto [xi, fv] : {std::pair{p, fp}, std::pair{q, fq}, std::pair{lo, at(lo)}, std::pair{hi, at(hi)}}) {
          if (fv > fx) {
            fx = fv;
            x[i] = xi;
          }
        }
      }
    }
    best = std::max(best, fx);
  }
  return best;
}

double l2_from_cubature(const quad::Cubature& cub, const PointFunction& f,
                        const RidgeCombination& c, double* node_max) {
  std::vector<double> g(cub.points.size());
  eval_combination_batch(c, cub.points, g);
  double s = 0.0, mx = 0.0;
  std::vector<double> x(static_cast<std::size_t>(c.dim));
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int i = 0; i < c.dim; ++i) x[static_cast<std::size_t>(i)] = cub.points.coords[static_cast<std::size_t>(i)][p];
    const double e = f(x) - g[p];
    s += cub.weights[p] * e * e;
    mx = std::max(mx, std::abs(e));
  }
  if (node_max) *node_max = mx;
  return std::sqrt(std::max(s, 0.0));
}

}  // namespace

double l2_distance(const PointFunction& f, const RidgeCombination& c,
                   const QuadratureSpec& spec) {
  return l2_from_cubature(*cubature_for(c.dim, spec), f, c, nullptr);
}

double l2_error(const TargetFunction& target, const RidgeCombination& c,
                const QuadratureSpec& spec) {
  if (target.dim != c.dim) throw UsageError("l2_error: dimension mismatch");
  return l2_distance(target.eval, c, spec);
}

double linf_distance(const PointFunction& f, const PointFunction& g, int dim,
                     const GridSpec& spec) {
  const PointCloud grid = make_grid(dim, spec);
  std::vector<double> err(grid.size());
  std::vector<double> x;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    x = grid.point(p);
    err[p] = std::abs(f(x) - g(x));
  }
  auto pointwise = [&](std::span<const double> y) { return std::abs(f(y) - g(y)); };
  return refine(pointwise, grid, err, grid_step(dim, spec), spec.refine_cells);
}

double linf_error(const TargetFunction& target, const RidgeCombination& c,
                  const GridSpec& spec) {
  if (target.dim != c.dim) throw UsageError("linf_error: dimension mismatch");
  const PointCloud grid = make_grid(c.dim, spec);
  std::vector<double> err(grid.size());
  eval_combination_batch(c, grid, err);
  std::vector<double> x;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    x = grid.point(p);
    err[p] = std::abs(target(x) - err[p]);
  }
  auto pointwise = [&](std::span<const double> y) {
    return std::abs(target(y) - eval_combination(c, y));
  };
  return refine(pointwise, grid, err, grid_step(c.dim, spec), spec.refine_cells);
}

ErrorReport measure(const TargetFunction& target, const RidgeCombination& c,
                    long m, std::string method, std::uint64_t seed,
                    const QuadratureSpec& quad, const GridSpec& grid) {
  if (target.dim != c.dim) throw UsageError("measure: dimension mismatch");
  ErrorReport r;
  r.m = m;
  r.method = std::move(method);
  r.seed = seed;
  double node_max = 0.0;
  r.l2 = l2_from_cubature(*cubature_for(c.dim, quad), target.eval, c, &node_max);
  r.linf = std::max(linf_error(target, c, grid), node_max);
  r.term_count = c.size();
  r.inner_sparsity_max = c.max_inner_sparsity();
  return r;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  RateFit fit;
  for (const auto& [m, e] : points) {
    if (!(e > 0.0) || !(m > 0.0)) {
      ++fit.dropped;
      continue;
    }
    fit.points.emplace_back(m, e);
  }
  if (fit.dropped > 0)
    std::fprintf(stderr, "fit_rate: dropped %zu nonpositive point(s)\n", fit.dropped);
  if (fit.points.size() < 3) throw UsageError("fit_rate: need at least 3 positive points");
  for (std::size_t i = 0; i < fit.points.size(); ++i)
    for (std::size_t j = i + 1; j < fit.points.size(); ++j)
      if (fit.points[i].first == fit.points[j].first) throw UsageError("fit_rate: duplicate m");

  const double n = static_cast<double>(fit.points.size());
  double sx = 0, sy = 0;
  for (const auto& [m, e] : fit.points) {
    sx += std::log(m);
    sy += std::log(e);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [m, e] : fit.points) {
    const double dx = std::log(m) - mx, dy = std::log(e) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [m, e] : fit.points) {
    const double r = std::log(e) - (fit.intercept + fit.slope * std::log(m));
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

double lower_bound_floor(long m, int dim, int order, double A) {
  if (m < 2) throw UsageError("lower_bound_floor: m must be at least 2");
  if (!(A > 0.0)) throw UsageError("lower_bound_floor: A must be positive");
  if (dim < 1 || (order != 2 && order != 3)) throw UsageError("lower_bound_floor: bad d or s");
  const double md = static_cast<double>(m) * dim;
  const double base = A * md * std::pow(static_cast<double>(dim), 2 * order) * std::log(md);
  return std::pow(base, -0.5 - static_cast<double>(order) / dim);
}

std::string report_csv_header() { return "m,method,seed,l2,linf,terms,sparsity"; }

std::string report_csv_row(const ErrorReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%ld,%s,%llu,%.17g,%.17g,%zu,%zu", r.m,
                r.method.c_str(), static_cast<unsigned long long>(r.seed), r.l2,
                r.linf, r.term_count, r.inner_sparsity_max);
  return buf;
}

}  // namespace ridge
