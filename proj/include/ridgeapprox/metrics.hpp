#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ridgeapprox/ridge.hpp"
#include "ridgeapprox/spectral.hpp"

namespace ridge {

using PointFunction = std::function<double(std::span<const double>)>;

/// Cubature used for L2(D, uniform P). Zero nodes_per_axis picks the
/// default: 64 per axis for d <= 3, 24 for d = 4, Halton (2^16) beyond.
struct QuadratureSpec {
  int nodes_per_axis = 0;
  std::size_t halton_points = 1u << 16;
};

/// Grid used for the sup norm. Zero resolution picks 2048 / 256 / 64 / 16
/// points per axis for d = 1 / 2 / 3 / 4; d = 4 adds random points.
struct GridSpec {
  int resolution = 0;
  std::size_t random_points = 100'000;
  int refine_cells = 10;
  std::uint64_t seed = 0x9e1d;
};

/// sqrt(int_D (f - g)^2 dP) with P uniform on D.
double l2_distance(const PointFunction& f, const RidgeCombination& c,
                   const QuadratureSpec& spec = {});
double l2_error(const TargetFunction& target, const RidgeCombination& c,
                const QuadratureSpec& spec = {});

/// Grid maximum of |f - g| followed by coordinate-wise golden-section
/// refinement around the largest grid values. A lower bound on the true sup.
double linf_distance(const PointFunction& f, const PointFunction& g, int dim,
                     const GridSpec& spec = {});
double linf_error(const TargetFunction& target, const RidgeCombination& c,
                  const GridSpec& spec = {});

struct ErrorReport {
  long m = 0;
  std::string method;
  std::uint64_t seed = 0;
  double l2 = 0.0;
  double linf = 0.0;
  std::size_t term_count = 0;
  std::size_t inner_sparsity_max = 0;
};

/// Both errors for one build. The reported sup also covers the quadrature
/// nodes, so l2 <= linf holds by construction.
ErrorReport measure(const TargetFunction& target, const RidgeCombination& c,
                    long m, std::string method, std::uint64_t seed,
                    const QuadratureSpec& quad = {}, const GridSpec& grid = {});

struct RateFit {
  std::vector<std::pair<double, double>> points;  // (m, error) actually used
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t dropped = 0;  // nonpositive errors discarded
};

/// Least squares of log(error) on log(m).
RateFit fit_rate(std::span<const std::pair<double, double>> points);

/// (A m d^{2s+1} log(md))^{-1/2 - s/d}.
double lower_bound_floor(long m, int dim, int order, double A);

std::string report_csv_header();
std::string report_csv_row(const ErrorReport& r);

}  // namespace ridge
