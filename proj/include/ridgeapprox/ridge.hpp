#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ridge {

/// D = [-1, 1]^d.
struct CubeDomain {
  int dim = 1;

  bool contains(std::span<const double> x) const;
};

/// One signed ridge term eta * (a.x - t)_+^{s-1}, with s = 2 (ReLU) or
/// s = 3 (squared ReLU).
struct RidgeAtom {
  int sign = 1;
  std::vector<double> a;
  double t = 0.0;
  int order = 2;

  int dim() const { return static_cast<int>(a.size()); }
  double l1_norm() const;
  std::size_t nonzeros() const;

  /// Throws UsageError unless sign is +-1, order is 2 or 3, t in [0, 1] and
  /// ||a||_1 <= 1 (up to rounding).
  void validate() const;
};

/// (z)_+^{s-1}.
double ramp_power(double z, int order);

/// eta * (a.x - t)_+^{s-1}.
double eval_atom(const RidgeAtom& atom, std::span<const double> x);

struct RidgeTerm {
  double b = 0.0;  // outer coefficient in [-1, 1], sign agrees with atom.sign
  RidgeAtom atom;
};

/// b0 + a0.x + (1/2) x^T A0 x + (v / ((s-1) m)) * sum_k b_k (a_k.x - t_k)_+^{s-1},
/// where m is the number of terms. The atom sign is carried for
/// stratification bookkeeping; evaluation uses b_k alone.
struct RidgeCombination {
  int dim = 1;
  int order = 2;
  double b0 = 0.0;
  std::vector<double> a0;
  std::optional<std::vector<double>> A0;  // row-major d x d, order 3 only
  double v = 0.0;
  std::vector<RidgeTerm> terms;

  static RidgeCombination affine(int dim, int order, double b0,
                                 std::vector<double> a0);

  std::size_t size() const { return terms.size(); }
  /// v/m for s = 2 and v/(2m) for s = 3; zero when there are no terms.
  double outer_factor() const;
  /// Largest ||a_k||_0 over the terms.
  std::size_t max_inner_sparsity() const;
  void validate() const;
};

double eval_combination(const RidgeCombination& c, std::span<const double> x);

/// Only the b0 + a0.x + x^T A0 x / 2 part.
double eval_correction(const RidgeCombination& c, std::span<const double> x);

/// Structure-of-arrays point set; coords[i][p] is coordinate i of point p.
struct PointCloud {
  int dim = 0;
  std::vector<std::vector<double>> coords;

  std::size_t size() const { return coords.empty() ? 0 : coords[0].size(); }
  std::vector<double> point(std::size_t p) const;
};

/// Evaluates c at every point of the cloud into out (size must match).
void eval_combination_batch(const RidgeCombination& c, const PointCloud& pts,
                            std::span<double> out);

/// Lipschitz upper bound on sup_x |h_u(x) - h_w(x)| over D; +inf when the
/// signs differ.
double atom_sup_distance(const RidgeAtom& u, const RidgeAtom& w);

}  // namespace ridge
