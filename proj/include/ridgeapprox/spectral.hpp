#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ridgeapprox/ridge.hpp"
#include "ridgeapprox/rng.hpp"

namespace ridge {

/// One frequency of a discrete spectrum: contributes mag * cos(omega.x + phase).
struct SpectralAtom {
  std::vector<double> omega;
  double mag = 0.0;
  double phase = 0.0;  // in (-pi, pi]
};

/// f(x) = sum_j mag_j cos(omega_j . x + phase_j): a real target with a known
/// discrete Fourier measure.
class SpectralMeasure {
 public:
  SpectralMeasure() = default;
  /// Throws UsageError on empty input, dimension mismatch, nonpositive
  /// magnitudes, phases outside (-pi, pi] or duplicate frequencies.
  SpectralMeasure(int dim, std::vector<SpectralAtom> atoms);

  int dim() const { return dim_; }
  const std::vector<SpectralAtom>& atoms() const { return atoms_; }

  double operator()(std::span<const double> x) const;
  double value_at_zero() const;
  std::vector<double> gradient_at_zero() const;
  /// Row-major d x d Hessian at the origin.
  std::vector<double> hessian_at_zero() const;

 private:
  int dim_ = 0;
  std::vector<SpectralAtom> atoms_;
};

/// v_{f,s} = sum_j ||omega_j||_1^s mag_j.
double v_fs(const SpectralMeasure& meas, int s);

/// sin(pi theta.x) / (4 pi ||theta||_1^2) as a spectral measure.
SpectralMeasure scaled_sine_measure(const std::vector<int>& theta);

/// A target with an exact evaluator and, where known, its value, gradient
/// and Hessian at the origin.
struct TargetFunction {
  int dim = 1;
  std::function<double(std::span<const double>)> eval;
  std::optional<double> b0;
  std::optional<std::vector<double>> a0;
  std::optional<std::vector<double>> A0;  // row-major Hessian

  double operator()(std::span<const double> x) const { return eval(x); }

  static TargetFunction from_spectral(const SpectralMeasure& meas);
  /// sin(pi theta.x) / (4 pi ||theta||_1^2).
  static TargetFunction scaled_sine(const std::vector<int>& theta);
};

/// One inner direction of a representation, carrying the t-density
/// scale * |sin(alpha t + beta)| on [0, 1] and the sign rule
/// eta(t) = eta_factor * sgn sin(alpha t + beta).
struct RepresentationComponent {
  std::vector<double> a;  // ||a||_1 = 1
  double alpha = 0.0;     // > 0
  double beta = 0.0;
  int eta_factor = 1;
  double scale = 0.0;
};

/// A sub-interval of one component on which the sine factor keeps its sign
/// (arc index k means alpha t + beta lies in [k pi, (k+1) pi]).
struct DensityPiece {
  int component = 0;
  long arc = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  int eta = 1;
  double mass = 0.0;  // probability under the normalized measure
};

/// f_residual(x) = v * E_P[ eta (a.x - t)_+^{s-1} ] (s = 2) or
/// (v/2) * E_P[ eta (a.x - t)_+^2 ] (s = 3), with P a finite mixture of
/// t-densities along fixed inner directions.
class IntegralRepresentation {
 public:
  enum class Kind { Spectral, ExactSine };

  static IntegralRepresentation from_spectral(const SpectralMeasure& meas,
                                              int order);
  static IntegralRepresentation exact_sine(const std::vector<int>& theta);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int order() const { return order_; }
  /// Total scale v.
  double scale() const { return v_; }
  const std::vector<RepresentationComponent>& components() const { return components_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  const std::optional<SpectralMeasure>& measure() const { return measure_; }
  const std::vector<int>& theta() const { return theta_; }

  /// The function the representation reproduces (target minus its affine or
  /// quadratic correction), in closed form.
  double residual(std::span<const double> x) const;

  /// Unnormalized density of (component, t).
  double density(int component, double t) const;
  int eta_at(int component, double t) const;

  /// Probability mass of the part of piece p inside [lo, hi).
  double piece_mass(const DensityPiece& p, double lo, double hi) const;
  /// Inverse-CDF draw of t from piece p restricted to [lo, hi); q in [0, 1).
  double invert_piece(const DensityPiece& p, double lo, double hi, double q) const;
  RidgeAtom atom_for(const DensityPiece& p, double t) const;

  RidgeAtom draw(CounterRng& rng) const;

 private:
  void build_pieces();

  Kind kind_ = Kind::Spectral;
  int dim_ = 0;
  int order_ = 2;
  double v_ = 0.0;
  double total_ = 0.0;  // sum of unnormalized component masses
  std::vector<RepresentationComponent> components_;
  std::vector<DensityPiece> pieces_;
  std::vector<double> cumulative_;
  std::optional<SpectralMeasure> measure_;
  std::vector<int> theta_;
};

/// Integral of |sin(alpha t + beta)| over [lo, hi], alpha > 0.
double abs_sine_integral(double alpha, double beta, double lo, double hi);

IntegralRepresentation exact_sine_representation(const std::vector<int>& theta);

/// n i.i.d. atoms from P, reproducible from the seed.
std::vector<RidgeAtom> sample_atom(const IntegralRepresentation& rep,
                                   std::size_t n, std::uint64_t seed);

/// Draws from dP(t, omega) = ||omega||_1^s |F| / v_{f,s} dt domega with the
/// sinusoidal factor folded into the outer coefficient; v = 2 v_{f,s}.
struct SimplifiedSample {
  double v = 0.0;
  int order = 2;
  std::vector<RidgeTerm> terms;
};
SimplifiedSample sample_atom_simplified(const SpectralMeasure& meas, int order,
                                        std::size_t n, std::uint64_t seed);

/// |-int_0^c [(z-u)_+ e^{iu} + (-z-u)_+ e^{-iu}] du - (e^{iz} - iz - 1)|.
double verify_ramp_identity(double z, double c, double tolerance = 1e-10);

/// |(i/2)||w||^3 int_0^1 [(-a.x-t)_+^2 e^{-i||w|| t} - (a.x-t)_+^2 e^{i||w|| t}] dt
///  - (e^{i w.x} + (w.x)^2/2 - i w.x - 1)|.
double verify_square_identity(std::span<const double> x,
                              std::span<const double> omega,
                              double tolerance = 1e-10);

}  // namespace ridge
