#include "ridgeapprox/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ridgeapprox/errors.hpp"

namespace ridge::quad {

namespace {

Rule1D compute_gauss_legendre(int n) {
  Rule1D rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

std::vector<double> clip_breaks(std::vector<double> breaks, double lo,
                                double hi) {
  std::vector<double> pts{lo};
  std::sort(breaks.begin(), breaks.end());
  for (double b : breaks)
    if (b > lo && b < hi) pts.push_back(b);
  pts.push_back(hi);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw UsageError("gauss_legendre: need at least one node");
  static std::mutex mutex;
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double piecewise_gauss(const std::function<double(double)>& f, double lo,
                       double hi, std::vector<double> breaks, int n) {
  const Rule1D& rule = gauss_legendre(n);
  const auto pts = clip_breaks(std::move(breaks), lo, hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double mid = 0.5 * (pts[k] + pts[k + 1]);
    const double half = 0.5 * (pts[k + 1] - pts[k]);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += half * s;
  }
  return total;
}

double adaptive(const std::function<double(double)>& f, double lo, double hi,
                double tolerance, std::vector<double> breaks) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto pts = clip_breaks(std::move(breaks), lo, hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    double err = 0.0;
    total += Kronrod::integrate(f, pts[k], pts[k + 1], 30, tolerance, &err);
  }
  return total;
}

Cubature tensor_gauss(int dim, int nodes_per_axis) {
  if (dim < 1) throw UsageError("tensor_gauss: dimension must be positive");
  const Rule1D& rule = gauss_legendre(nodes_per_axis);
  const std::size_t n = static_cast<std::size_t>(nodes_per_axis);
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= n;

  Cubature cub;
  cub.points.dim = dim;
  cub.points.coords.assign(static_cast<std::size_t>(dim), std::vector<double>(total));
  cub.weights.assign(total, 1.0);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rem = p;
    for (int i = 0; i < dim; ++i) {
      const std::size_t k = rem % n;
      rem /= n;
      cub.points.coords[static_cast<std::size_t>(i)][p] = rule.nodes[k];
      cub.weights[p] *= 0.5 * rule.weights[k];
    }
  }
  return cub;
}

Cubature halton(int dim, std::size_t count) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (dim < 1 || dim > static_cast<int>(std::size(kPrimes)))
    throw UsageError("halton: unsupported dimension");
  Cubature cub;
  cub.points.dim = dim;
  cub.points.coords.assign(static_cast<std::size_t>(dim), std::vector<double>(count));
  cub.weights.assign(count, 1.0 / static_cast<double>(count));
  for (int i = 0; i < dim; ++i) {
    const int base = kPrimes[i];
    for (std::size_t p = 0; p < count; ++p) {
      double f = 1.0, r = 0.0;
      for (std::size_t k = p + 1; k > 0; k /= static_cast<std::size_t>(base)) {
        f /= base;
        r += f * static_cast<double>(k % static_cast<std::size_t>(base));
      }
      cub.points.coords[static_cast<std::size_t>(i)][p] = 2.0 * r - 1.0;
    }
  }
  return cub;
}

}  // namespace ridge::quad
