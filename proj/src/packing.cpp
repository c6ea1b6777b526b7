#include "ridgeapprox/packing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ridgeapprox/errors.hpp"
#include "ridgeapprox/quadrature.hpp"
#include "ridgeapprox/rng.hpp"

namespace ridge {

namespace {
constexpr double kPi = std::numbers::pi;

void check_codeword(const SineFamily& fam, std::span<const std::uint8_t> w) {
  if (w.size() != fam.size()) throw UsageError("codeword length does not match family size");
  for (auto b : w)
    if (b > 1) throw UsageError("codeword entries must be 0 or 1");
}

int default_nodes(int R, int dim) { return std::max(16, 8 * R * dim) + 16; }
}  // namespace

double SineMember::operator()(std::span<const double> x) const {
  double dot = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) dot += theta[i] * x[i];
  return scale * std::sin(kPi * dot);
}

SineFamily::SineFamily(int R, int dim) : R_(R), dim_(dim) {
  if (R < 1 || dim < 1) throw UsageError("sine_family: R and d must be positive");
  double total = std::pow(static_cast<double>(R), dim);
  if (total > 1e6) throw UsageError("sine_family: R^d exceeds 1e6");
  const auto n = static_cast<std::size_t>(std::llround(total));
  members_.reserve(n);
  std::vector<int> theta(static_cast<std::size_t>(dim), 1);
  for (std::size_t k = 0; k < n; ++k) {
    SineMember m;
    m.theta = theta;
    for (int v : theta) m.l1 += v;
    m.scale = 1.0 / (4.0 * kPi * m.l1 * m.l1);
    m.norm = m.scale / std::numbers::sqrt2;
    members_.push_back(std::move(m));
    // odometer on {1..R}^d, first axis fastest
    for (std::size_t i = 0; i < theta.size(); ++i) {
      if (++theta[i] <= R) break;
      theta[i] = 1;
    }
  }
}

double SineFamily::min_norm() const {
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& m : members_) mn = std::min(mn, m.norm);
  return mn;
}

std::vector<double> SineFamily::gram() const {
  const std::size_t n = size();
  std::vector<double> g(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) g[i * n + i] = members_[i].norm * members_[i].norm;
  return g;
}

std::vector<double> SineFamily::gram_quadrature(int nodes_per_axis) const {
  const int q = nodes_per_axis > 0 ? nodes_per_axis : default_nodes(R_, dim_);
  const auto cub = quad::tensor_gauss(dim_, q);
  const std::size_t n = size(), P = cub.points.size();
  std::vector<double> vals(n * P);
  std::vector<double> x;
  for (std::size_t p = 0; p < P; ++p) {
    x = cub.points.point(p);
    for (std::size_t i = 0; i < n; ++i) vals[i * P + p] = members_[i](x);
  }
  std::vector<double> g(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < P; ++p) s += cub.weights[p] * vals[i * P + p] * vals[j * P + p];
      g[i * n + j] = g[j * n + i] = s;
    }
  return g;
}

SineFamily sine_family(int R, int dim) { return SineFamily(R, dim); }

double pairwise_distance(const SineFamily& fam, std::span<const std::uint8_t> w,
                         std::span<const std::uint8_t> w2) {
  check_codeword(fam, w);
  check_codeword(fam, w2);
  double s = 0.0;
  for (std::size_t h = 0; h < w.size(); ++h) {
    if (w[h] != w2[h]) s += fam[h].norm * fam[h].norm;
  }
  return std::sqrt(s) / static_cast<double>(fam.size());
}

double pairwise_distance_quadrature(const SineFamily& fam,
                                    std::span<const std::uint8_t> w,
                                    std::span<const std::uint8_t> w2,
                                    int nodes_per_axis) {
  check_codeword(fam, w);
  check_codeword(fam, w2);
  const int q = nodes_per_axis > 0 ? nodes_per_axis : default_nodes(fam.R(), fam.dim());
  const auto cub = quad::tensor_gauss(fam.dim(), q);
  const double inv = 1.0 / static_cast<double>(fam.size());
  double s = 0.0;
  std::vector<double> x;
  for (std::size_t p = 0; p < cub.points.size(); ++p) {
    x = cub.points.point(p);
    double diff = 0.0;
    for (std::size_t h = 0; h < fam.size(); ++h)
      if (w[h] != w2[h]) diff += (static_cast<double>(w[h]) - w2[h]) * fam[h](x);
    diff *= inv;
    s += cub.weights[p] * diff * diff;
  }
  return std::sqrt(s);
}

double separation_bound(const SineFamily& fam) {
  return 0.5 * fam.min_norm() / std::sqrt(static_cast<double>(fam.size()));
}

PackingSet select_packing(const SineFamily& fam, std::size_t target_size,
                          std::uint64_t seed, std::uint64_t trial_budget) {
  if (fam.size() < 3) throw UsageError("select_packing: family needs at least 3 members");
  if (target_size < 2) throw UsageError("select_packing: target size must be at least 2");
  PackingSet out;
  out.target_size = target_size;
  out.separation_bound = separation_bound(fam);
  out.min_distance = std::numeric_limits<double>::infinity();
  CounterRng rng(seed, 0x9ac4);
  Codeword cand(fam.size());
  while (out.codewords.size() < target_size && out.trials < trial_budget) {
    ++out.trials;
    for (auto& b : cand) b = static_cast<std::uint8_t>(rng.next_u64() >> 63);
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& c : out.codewords) closest = std::min(closest, pairwise_distance(fam, cand, c));
    if (closest >= out.separation_bound) {
      out.codewords.push_back(cand);
      out.min_distance = std::min(out.min_distance, closest);
    }
  }
  out.shortfall = out.codewords.size() < target_size;
  return out;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("binary_entropy: p outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double packing_cardinality(std::size_t family_size) {
  return std::exp2((1.0 - binary_entropy(0.25)) * static_cast<double>(family_size) - 1.0);
}

PackingCurve packing_lower_curves(double epsilon, int dim, double c) {
  if (!(epsilon > 0.0)) throw UsageError("packing_lower_curve: epsilon must be positive");
  if (dim < 1) throw UsageError("packing_lower_curve: d must be positive");
  const double d = dim;
  const double p = 2.0 * d / (4.0 + d);
  const double lead = std::log(2.0) * (1.0 - binary_entropy(0.25));
  PackingCurve out;
  out.sharp = lead * std::pow(8.0 * epsilon * std::numbers::sqrt2 * kPi * d * d, -p) - 1.0;
  if (!(c > 0.0)) {
    const double k = std::pow(lead / 2.0, -1.0 / p);
    c = 8.0 * std::numbers::sqrt2 * kPi * k;
  }
  out.c = c;
  out.loose = std::pow(c * epsilon * d * d, -p);
  return out;
}

double packing_lower_curve(double epsilon, int dim) {
  return packing_lower_curves(epsilon, dim).sharp;
}

double packing_epsilon(int R, int dim) {
  if (R < 1 || dim < 1) throw UsageError("packing_epsilon: R and d must be positive");
  const double d = dim;
  return 1.0 / (8.0 * std::numbers::sqrt2 * kPi * d * d * std::pow(static_cast<double>(R), 2.0 + d / 2.0));
}

}  // namespace ridge
