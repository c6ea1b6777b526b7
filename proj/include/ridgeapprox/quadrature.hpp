#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ridgeapprox/ridge.hpp"

namespace ridge::quad {

struct Rule1D {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on the three-term
/// recurrence). Rules are cached per n.
const Rule1D& gauss_legendre(int n);

/// Integral of f over [lo, hi] with an n-point Gauss-Legendre rule applied on
/// each piece between consecutive sorted breakpoints (clipped to [lo, hi]).
double piecewise_gauss(const std::function<double(double)>& f, double lo,
                       double hi, std::vector<double> breaks = {}, int n = 20);

/// Adaptive Gauss-Kronrod (7/15) on [lo, hi], split at any breakpoints first.
double adaptive(const std::function<double(double)>& f, double lo, double hi,
                double tolerance, std::vector<double> breaks = {});

/// Nodes and weights of a cubature for the uniform probability measure on
/// [-1, 1]^d. Weights sum to one.
struct Cubature {
  PointCloud points;
  std::vector<double> weights;
};

/// Tensor-product Gauss-Legendre with n nodes per axis.
Cubature tensor_gauss(int dim, int nodes_per_axis);

/// Equal-weight Halton point set of the given size (bases 2, 3, 5, ...),
/// mapped to [-1, 1]^d.
Cubature halton(int dim, std::size_t count);

}  // namespace ridge::quad
