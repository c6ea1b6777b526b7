#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ridge {

/// x -> sin(pi theta.x) / (4 pi ||theta||_1^2) for every theta in {1..R}^d.
struct SineMember {
  std::vector<int> theta;
  int l1 = 0;           // ||theta||_1
  double scale = 0.0;   // 1 / (4 pi l1^2)
  double norm = 0.0;    // L2(D, uniform) norm, scale / sqrt(2)

  double operator()(std::span<const double> x) const;
};

class SineFamily {
 public:
  SineFamily(int R, int dim);

  int R() const { return R_; }
  int dim() const { return dim_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<SineMember>& members() const { return members_; }
  const SineMember& operator[](std::size_t i) const { return members_[i]; }
  double min_norm() const;

  /// Closed-form Gram matrix (diagonal norm^2, zero elsewhere), row-major.
  std::vector<double> gram() const;
  /// Gram matrix by tensor Gauss-Legendre with the given nodes per axis
  /// (0 picks max(16, 8Rd) + 16).
  std::vector<double> gram_quadrature(int nodes_per_axis = 0) const;

 private:
  int R_;
  int dim_;
  std::vector<SineMember> members_;
};

SineFamily sine_family(int R, int dim);

using Codeword = std::vector<std::uint8_t>;

/// L2 distance between the averages (1/|H|) sum_h w_h h of two codewords,
/// in closed form through orthogonality.
double pairwise_distance(const SineFamily& fam, std::span<const std::uint8_t> w,
                         std::span<const std::uint8_t> w2);

/// Same distance by quadrature on the averaged functions.
double pairwise_distance_quadrature(const SineFamily& fam,
                                    std::span<const std::uint8_t> w,
                                    std::span<const std::uint8_t> w2,
                                    int nodes_per_axis = 0);

struct PackingSet {
  std::vector<Codeword> codewords;
  double min_distance = 0.0;  // +inf with fewer than two codewords
  double separation_bound = 0.0;
  std::size_t target_size = 0;
  std::uint64_t trials = 0;
  bool shortfall = false;
};

/// (1/2) min_h ||h|| / sqrt(|H|).
double separation_bound(const SineFamily& fam);

/// Greedy selection over uniformly random codewords: a candidate is kept when
/// its distance to every kept codeword is at least the separation bound.
PackingSet select_packing(const SineFamily& fam, std::size_t target_size,
                          std::uint64_t seed, std::uint64_t trial_budget = 100'000);

/// 2^{(1 - H(1/4)) |H| - 1}.
double packing_cardinality(std::size_t family_size);

/// Binary entropy in bits.
double binary_entropy(double p);

struct PackingCurve {
  double sharp = 0.0;  // ln2 (1 - H(1/4)) (8 eps sqrt2 pi d^2)^{-2d/(4+d)} - 1
  double loose = 0.0;  // (c eps d^2)^{-2d/(4+d)}
  double c = 0.0;
};

/// Lower bound on the log packing number at scale eps. Returns the first form.
double packing_lower_curve(double epsilon, int dim);

/// Both forms. c <= 0 picks c = 8 sqrt2 pi k with k^{-2d/(4+d)} =
/// ln2 (1 - H(1/4)) / 2, for which loose <= sharp whenever sharp >= 1.
PackingCurve packing_lower_curves(double epsilon, int dim, double c = 0.0);

/// eps at which a family with parameter R sits: 1 / (8 sqrt2 pi d^2 R^{2+d/2}).
double packing_epsilon(int R, int dim);

}  // namespace ridge
