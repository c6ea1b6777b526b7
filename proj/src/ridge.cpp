#include "ridgeapprox/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ridgeapprox/errors.hpp"

namespace ridge {

namespace {

void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw UsageError(std::string(what) + ": dimension mismatch (" +
                     std::to_string(expected) + " vs " + std::to_string(got) +
                     ")");
  }
}

double dot(std::span<const double> a, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
  return s;
}

}  // namespace

bool CubeDomain::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim) return false;
  return std::all_of(x.begin(), x.end(),
                     [](double xi) { return std::abs(xi) <= 1.0; });
}

double RidgeAtom::l1_norm() const {
  double s = 0.0;
  for (double ai : a) s += std::abs(ai);
  return s;
}

std::size_t RidgeAtom::nonzeros() const {
  return static_cast<std::size_t>(
      std::count_if(a.begin(), a.end(), [](double ai) { return ai != 0.0; }));
}

void RidgeAtom::validate() const {
  if (sign != 1 && sign != -1) throw UsageError("atom sign must be +-1");
  if (order != 2 && order != 3) throw UsageError("atom order must be 2 or 3");
  if (!(t >= 0.0 && t <= 1.0)) throw UsageError("atom threshold outside [0,1]");
  if (a.empty()) throw UsageError("atom has empty inner weights");
  if (l1_norm() > 1.0 + 1e-12) throw UsageError("atom has ||a||_1 > 1");
}

double ramp_power(double z, int order) {
  const double r = z > 0.0 ? z : 0.0;
  return order == 3 ? r * r : r;
}

double eval_atom(const RidgeAtom& atom, std::span<const double> x) {
  check_dim(atom.a.size(), x.size(), "eval_atom");
  return atom.sign * ramp_power(dot(atom.a, x) - atom.t, atom.order);
}

RidgeCombination RidgeCombination::affine(int dim, int order, double b0,
                                          std::vector<double> a0) {
  RidgeCombination c;
  c.dim = dim;
  c.order = order;
  c.b0 = b0;
  c.a0 = a0.empty() ? std::vector<double>(static_cast<std::size_t>(dim), 0.0)
                    : std::move(a0);
  return c;
}

double RidgeCombination::outer_factor() const {
  if (terms.empty()) return 0.0;
  const double m = static_cast<double>(terms.size());
  return order == 3 ? v / (2.0 * m) : v / m;
}

std::size_t RidgeCombination::max_inner_sparsity() const {
  std::size_t best = 0;
  for (const auto& term : terms) best = std::max(best, term.atom.nonzeros());
  return best;
}

void RidgeCombination::validate() const {
  if (dim < 1) throw UsageError("combination dimension must be positive");
  if (order != 2 && order != 3) throw UsageError("combination order must be 2 or 3");
  check_dim(static_cast<std::size_t>(dim), a0.size(), "combination a0");
  if (A0) {
    if (order == 2) throw UsageError("quadratic term requires order 3");
    check_dim(static_cast<std::size_t>(dim) * dim, A0->size(), "combination A0");
  }
  if (!(v >= 0.0)) throw UsageError("combination scale v must be nonnegative");
  for (const auto& term : terms) {
    term.atom.validate();
    check_dim(static_cast<std::size_t>(dim), term.atom.a.size(), "combination term");
    if (term.atom.order != order) throw UsageError("term order differs from combination");
    if (std::abs(term.b) > 1.0) throw UsageError("term coefficient outside [-1,1]");
    if (term.b * term.atom.sign < 0.0) throw UsageError("term coefficient sign disagrees with atom sign");
  }
}

double eval_correction(const RidgeCombination& c, std::span<const double> x) {
  check_dim(static_cast<std::size_t>(c.dim), x.size(), "eval_combination");
  double value = c.b0 + dot(c.a0, x);
  if (c.A0) {
    const auto& A = *c.A0;
    const std::size_t d = x.size();
    double q = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) q += x[i] * A[i * d + j] * x[j];
    value += 0.5 * q;
  }
  return value;
}

double eval_combination(const RidgeCombination& c, std::span<const double> x) {
  double value = eval_correction(c, x);
  if (c.terms.empty()) return value;
  double sum = 0.0;
  for (const auto& term : c.terms) {
    sum += term.b * ramp_power(dot(term.atom.a, x) - term.atom.t, c.order);
  }
  return value + c.outer_factor() * sum;
}

std::vector<double> PointCloud::point(std::size_t p) const {
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(i)][p];
  return x;
}

void eval_combination_batch(const RidgeCombination& c, const PointCloud& pts,
                            std::span<double> out) {
  check_dim(static_cast<std::size_t>(c.dim), static_cast<std::size_t>(pts.dim),
            "eval_combination_batch");
  const std::size_t n = pts.size();
  if (out.size() != n) throw UsageError("eval_combination_batch: output size mismatch");
  const std::size_t d = static_cast<std::size_t>(c.dim);

  for (std::size_t p = 0; p < n; ++p) {
    double value = c.b0;
    for (std::size_t i = 0; i < d; ++i) value += c.a0[i] * pts.coords[i][p];
    if (c.A0) {
      double q = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          q += pts.coords[i][p] * (*c.A0)[i * d + j] * pts.coords[j][p];
      value += 0.5 * q;
    }
    out[p] = value;
  }
  if (c.terms.empty()) return;

  // Term-major loop so the inner loop over points vectorizes.
  std::vector<double> acc(n, 0.0), z(n);
  for (const auto& term : c.terms) {
    std::fill(z.begin(), z.end(), -term.atom.t);
    for (std::size_t i = 0; i < d; ++i) {
      const double ai = term.atom.a[i];
      if (ai == 0.0) continue;
      const double* xi = pts.coords[i].data();
      for (std::size_t p = 0; p < n; ++p) z[p] += ai * xi[p];
    }
    const double b = term.b;
    if (c.order == 3) {
      for (std::size_t p = 0; p < n; ++p) {
        const double r = z[p] > 0.0 ? z[p] : 0.0;
        acc[p] += b * r * r;
      }
    } else {
      for (std::size_t p = 0; p < n; ++p) acc[p] += b * (z[p] > 0.0 ? z[p] : 0.0);
    }
  }
  const double factor = c.outer_factor();
  for (std::size_t p = 0; p < n; ++p) out[p] += factor * acc[p];
}

double atom_sup_distance(const RidgeAtom& u, const RidgeAtom& w) {
  if (u.order != w.order) throw UsageError("atom_sup_distance: order mismatch");
  check_dim(u.a.size(), w.a.size(), "atom_sup_distance");
  if (u.sign != w.sign) return std::numeric_limits<double>::infinity();
  double l1 = std::abs(u.t - w.t);
  for (std::size_t i = 0; i < u.a.size(); ++i) l1 += std::abs(u.a[i] - w.a[i]);
  return u.order == 3 ? 2.0 * l1 : l1;
}

}  // namespace ridge
