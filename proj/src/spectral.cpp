#include "ridgeapprox/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "ridgeapprox/errors.hpp"
#include "ridgeapprox/quadrature.hpp"

namespace ridge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSampleStream = 0x5a3d;
constexpr std::uint64_t kSimplifiedStream = 0x51e0;

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

int theta_l1(const std::vector<int>& theta) {
  if (theta.empty()) throw UsageError("theta must be nonempty");
  int k = 0;
  for (int th : theta) {
    if (th < 1) throw UsageError("theta entries must be positive integers");
    k += th;
  }
  return k;
}

// Zeros of sin(alpha t + beta) strictly inside (lo, hi), plus the endpoints.
std::vector<double> arc_breaks(double alpha, double beta, double lo, double hi) {
  std::vector<double> pts{lo};
  const double phi_lo = alpha * lo + beta;
  const double phi_hi = alpha * hi + beta;
  for (double k = std::floor(phi_lo / kPi) + 1.0; k * kPi < phi_hi; k += 1.0) {
    const double t = (k * kPi - beta) / alpha;
    if (t > lo && t < hi) pts.push_back(t);
  }
  pts.push_back(hi);
  return pts;
}

long arc_index(double alpha, double beta, double lo, double hi) {
  return static_cast<long>(std::floor((alpha * 0.5 * (lo + hi) + beta) / kPi));
}

// Integral of |sin| between psi0 <= psi1 inside [0, pi]:
// cos(psi0) - cos(psi1) = 2 sin((psi0+psi1)/2) sin((psi1-psi0)/2).
double arc_mass(double alpha, double beta, long arc, double lo, double hi) {
  const double shift = static_cast<double>(arc) * kPi;
  const double psi0 = alpha * lo + beta - shift;
  const double psi1 = alpha * hi + beta - shift;
  const double m = 2.0 * std::sin(0.5 * (psi0 + psi1)) *
                   std::sin(0.5 * alpha * (hi - lo)) / alpha;
  return std::max(m, 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------

SpectralMeasure::SpectralMeasure(int dim, std::vector<SpectralAtom> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
  if (dim_ < 1) throw UsageError("spectral measure dimension must be positive");
  if (atoms_.empty()) throw UsageError("spectral measure has no atoms");
  for (const auto& atom : atoms_) {
    if (static_cast<int>(atom.omega.size()) != dim_)
      throw UsageError("spectral atom dimension mismatch");
    if (!(atom.mag > 0.0)) throw UsageError("spectral magnitudes must be positive");
    if (!(atom.phase > -kPi && atom.phase <= kPi))
      throw UsageError("spectral phase outside (-pi, pi]");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    for (std::size_t j = i + 1; j < atoms_.size(); ++j)
      if (atoms_[i].omega == atoms_[j].omega)
        throw UsageError("duplicate frequency in spectral measure");
}

double SpectralMeasure::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw UsageError("spectral evaluation: dimension mismatch");
  double f = 0.0;
  for (const auto& atom : atoms_) f += atom.mag * std::cos(dot(atom.omega, x) + atom.phase);
  return f;
}

double SpectralMeasure::value_at_zero() const {
  double b0 = 0.0;
  for (const auto& atom : atoms_) b0 += atom.mag * std::cos(atom.phase);
  return b0;
}

std::vector<double> SpectralMeasure::gradient_at_zero() const {
  std::vector<double> g(static_cast<std::size_t>(dim_), 0.0);
  for (const auto& atom : atoms_) {
    const double c = -atom.mag * std::sin(atom.phase);
    for (int i = 0; i < dim_; ++i) g[static_cast<std::size_t>(i)] += c * atom.omega[static_cast<std::size_t>(i)];
  }
  return g;
}

std::vector<double> SpectralMeasure::hessian_at_zero() const {
  const std::size_t d = static_cast<std::size_t>(dim_);
  std::vector<double> h(d * d, 0.0);
  for (const auto& atom : atoms_) {
    const double c = -atom.mag * std::cos(atom.phase);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) h[i * d + j] += c * atom.omega[i] * atom.omega[j];
  }
  return h;
}

double v_fs(const SpectralMeasure& meas, int s) {
  if (s < 0 || s > 3) throw UsageError("v_fs: s must be in {0,1,2,3}");
  double v = 0.0;
  for (const auto& atom : meas.atoms()) v += std::pow(l1(atom.omega), s) * atom.mag;
  return v;
}

SpectralMeasure scaled_sine_measure(const std::vector<int>& theta) {
  const int k = theta_l1(theta);
  SpectralAtom atom;
  for (int th : theta) atom.omega.push_back(kPi * th);
  atom.mag = 1.0 / (4.0 * kPi * k * k);
  atom.phase = -kPi / 2.0;
  return SpectralMeasure(static_cast<int>(theta.size()), {atom});
}

TargetFunction TargetFunction::from_spectral(const SpectralMeasure& meas) {
  TargetFunction f;
  f.dim = meas.dim();
  f.eval = [meas](std::span<const double> x) { return meas(x); };
  f.b0 = meas.value_at_zero();
  f.a0 = meas.gradient_at_zero();
  f.A0 = meas.hessian_at_zero();
  return f;
}

TargetFunction TargetFunction::scaled_sine(const std::vector<int>& theta) {
  const int k = theta_l1(theta);
  const double scale = 1.0 / (4.0 * kPi * k * k);
  std::vector<double> th(theta.begin(), theta.end());
  TargetFunction f;
  f.dim = static_cast<int>(theta.size());
  f.eval = [th, scale](std::span<const double> x) {
    if (x.size() != th.size()) throw UsageError("scaled sine: dimension mismatch");
    return scale * std::sin(kPi * dot(th, x));
  };
  f.b0 = 0.0;
  std::vector<double> a0(th.size());
  for (std::size_t i = 0; i < th.size(); ++i) a0[i] = th[i] / (4.0 * k * k);
  f.a0 = a0;
  f.A0 = std::vector<double>(th.size() * th.size(), 0.0);
  return f;
}

// ---------------------------------------------------------------------------

double abs_sine_integral(double alpha, double beta, double lo, double hi) {
  if (!(alpha > 0.0)) throw UsageError("abs_sine_integral: alpha must be positive");
  const auto pts = arc_breaks(alpha, beta, lo, hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    total += arc_mass(alpha, beta, arc_index(alpha, beta, pts[i], pts[i + 1]),
                      pts[i], pts[i + 1]);
  }
  return total;
}

IntegralRepresentation IntegralRepresentation::from_spectral(
    const SpectralMeasure& meas, int order) {
  if (order != 2 && order != 3) throw UsageError("representation order must be 2 or 3");
  IntegralRepresentation rep;
  rep.kind_ = Kind::Spectral;
  rep.dim_ = meas.dim();
  rep.order_ = order;
  rep.measure_ = meas;
  for (const auto& atom : meas.atoms()) {
    const double c = l1(atom.omega);
    if (c == 0.0) continue;  // zero sampling weight
    for (int z : {1, -1}) {
      RepresentationComponent comp;
      comp.a.resize(atom.omega.size());
      for (std::size_t i = 0; i < atom.omega.size(); ++i) comp.a[i] = z * atom.omega[i] / c;
      comp.alpha = c;
      if (order == 2) {
        // eta = -sgn cos(z c t + b) = -sgn sin(c t + pi/2 + z b)
        comp.beta = kPi / 2.0 + z * atom.phase;
        comp.eta_factor = -1;
      } else {
        // eta = z sgn sin(z c t + b) = sgn sin(c t + z b)
        comp.beta = z * atom.phase;
        comp.eta_factor = 1;
      }
      comp.scale = atom.mag * std::pow(c, order);
      rep.components_.push_back(std::move(comp));
    }
  }
  rep.build_pieces();
  rep.v_ = rep.total_;
  return rep;
}

IntegralRepresentation IntegralRepresentation::exact_sine(const std::vector<int>& theta) {
  const int k = theta_l1(theta);
  IntegralRepresentation rep;
  rep.kind_ = Kind::ExactSine;
  rep.dim_ = static_cast<int>(theta.size());
  rep.order_ = 2;
  rep.theta_ = theta;
  for (int z : {1, -1}) {
    RepresentationComponent comp;
    for (int th : theta) comp.a.push_back(static_cast<double>(z * th) / k);
    comp.alpha = kPi * k;
    comp.beta = 0.0;
    comp.eta_factor = -z;
    comp.scale = kPi / 4.0;
    rep.components_.push_back(std::move(comp));
  }
  rep.build_pieces();
  rep.v_ = 1.0;
  return rep;
}

void IntegralRepresentation::build_pieces() {
  pieces_.clear();
  std::vector<double> raw;
  for (std::size_t ci = 0; ci < components_.size(); ++ci) {
    const auto& comp = components_[ci];
    const auto pts = arc_breaks(comp.alpha, comp.beta, 0.0, 1.0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (pts[i + 1] <= pts[i]) continue;
      DensityPiece p;
      p.component = static_cast<int>(ci);
      p.t0 = pts[i];
      p.t1 = pts[i + 1];
      p.arc = arc_index(comp.alpha, comp.beta, p.t0, p.t1);
      p.eta = comp.eta_factor * ((p.arc % 2 == 0) ? 1 : -1);
      const double m = comp.scale * arc_mass(comp.alpha, comp.beta, p.arc, p.t0, p.t1);
      if (m <= 0.0) continue;
      raw.push_back(m);
      pieces_.push_back(p);
    }
  }
  total_ = 0.0;
  for (double m : raw) total_ += m;
  cumulative_.clear();
  double run = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    pieces_[i].mass = raw[i] / total_;
    run += pieces_[i].mass;
    cumulative_.push_back(run);
  }
}

double IntegralRepresentation::residual(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw UsageError("residual: dimension mismatch");
  if (kind_ == Kind::ExactSine) {
    const int k = theta_l1(theta_);
    double tx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) tx += theta_[i] * x[i];
    return std::sin(kPi * tx) / (4.0 * kPi * k * k) - tx / (4.0 * k * k);
  }
  double r = 0.0;
  for (const auto& atom : measure_->atoms()) {
    const double w = dot(atom.omega, x);
    const double b = atom.phase;
    double term = std::cos(w + b) - std::cos(b) + std::sin(b) * w;
    if (order_ == 3) term += 0.5 * std::cos(b) * w * w;
    r += atom.mag * term;
  }
  return r;
}

double IntegralRepresentation::density(int component, double t) const {
  const auto& comp = components_.at(static_cast<std::size_t>(component));
  if (t < 0.0 || t > 1.0) return 0.0;
  return comp.scale * std::abs(std::sin(comp.alpha * t + comp.beta)) / total_;
}

int IntegralRepresentation::eta_at(int component, double t) const {
  const auto& comp = components_.at(static_cast<std::size_t>(component));
  return std::sin(comp.alpha * t + comp.beta) >= 0.0 ? comp.eta_factor : -comp.eta_factor;
}

double IntegralRepresentation::piece_mass(const DensityPiece& p, double lo,
                                          double hi) const {
  const double a = std::max(lo, p.t0), b = std::min(hi, p.t1);
  if (!(b > a)) return 0.0;
  const auto& comp = components_[static_cast<std::size_t>(p.component)];
  return comp.scale * arc_mass(comp.alpha, comp.beta, p.arc, a, b) / total_;
}

double IntegralRepresentation::invert_piece(const DensityPiece& p, double lo,
                                            double hi, double q) const {
  const double a = std::max(lo, p.t0), b = std::min(hi, p.t1);
  const auto& comp = components_[static_cast<std::size_t>(p.component)];
  const double shift = static_cast<double>(p.arc) * kPi;
  const double psi0 = comp.alpha * a + comp.beta - shift;
  const double psi1 = comp.alpha * b + comp.beta - shift;
  const double span = 2.0 * std::sin(0.5 * (psi0 + psi1)) * std::sin(0.5 * (psi1 - psi0));
  const double cos_psi = std::clamp(std::cos(psi0) - q * span, -1.0, 1.0);
  const double psi = std::clamp(std::acos(cos_psi), std::min(psi0, psi1), std::max(psi0, psi1));
  double t = (psi + shift - comp.beta) / comp.alpha;
  t = std::clamp(t, a, b);
  if (t >= b && b < 1.0) t = std::nextafter(b, a);
  return t;
}

RidgeAtom IntegralRepresentation::atom_for(const DensityPiece& p, double t) const {
  RidgeAtom atom;
  atom.sign = p.eta;
  atom.a = components_[static_cast<std::size_t>(p.component)].a;
  atom.t = t;
  atom.order = order_;
  return atom;
}

RidgeAtom IntegralRepresentation::draw(CounterRng& rng) const {
  if (pieces_.empty() || !(v_ > 0.0))
    throw UsageError("cannot sample a representation with zero total scale");
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  const auto& p = pieces_[static_cast<std::size_t>(it - cumulative_.begin())];
  return atom_for(p, invert_piece(p, p.t0, p.t1, rng.uniform()));
}

IntegralRepresentation exact_sine_representation(const std::vector<int>& theta) {
  return IntegralRepresentation::exact_sine(theta);
}

std::vector<RidgeAtom> sample_atom(const IntegralRepresentation& rep,
                                   std::size_t n, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample_atom: n must be at least 1");
  CounterRng rng(seed, kSampleStream);
  std::vector<RidgeAtom> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(rep.draw(rng));
  return out;
}

SimplifiedSample sample_atom_simplified(const SpectralMeasure& meas, int order,
                                        std::size_t n, std::uint64_t seed) {
  if (order != 2 && order != 3) throw UsageError("simplified sampler order must be 2 or 3");
  SimplifiedSample out;
  out.order = order;
  const double vfs = v_fs(meas, order);
  if (vfs == 0.0) return out;
  out.v = 2.0 * vfs;

  const auto& atoms = meas.atoms();
  std::vector<double> cumulative;
  double run = 0.0;
  for (const auto& atom : atoms) {
    run += atom.mag * std::pow(l1(atom.omega), order);
    cumulative.push_back(run);
  }
  CounterRng rng(seed, kSimplifiedStream);
  out.terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), rng.uniform() * run);
    if (it == cumulative.end()) --it;
    const auto& atom = atoms[static_cast<std::size_t>(it - cumulative.begin())];
    const double c = l1(atom.omega);
    const double t = rng.uniform();
    const int z = rng.rademacher();
    const double b = order == 2 ? -std::cos(z * c * t + atom.phase)
                                : z * std::sin(z * c * t + atom.phase);
    RidgeTerm term;
    term.b = b;
    term.atom.sign = b < 0.0 ? -1 : 1;
    term.atom.t = t;
    term.atom.order = order;
    term.atom.a.resize(atom.omega.size());
    for (std::size_t k = 0; k < atom.omega.size(); ++k) term.atom.a[k] = z * atom.omega[k] / c;
    out.terms.push_back(std::move(term));
  }
  return out;
}

// ---------------------------------------------------------------------------

double verify_ramp_identity(double z, double c, double tolerance) {
  if (c < std::abs(z)) throw UsageError("verify_ramp_identity: need |z| <= c");
  auto re = [z](double u) {
    return -(std::max(z - u, 0.0) + std::max(-z - u, 0.0)) * std::cos(u);
  };
  auto im = [z](double u) {
    return -(std::max(z - u, 0.0) - std::max(-z - u, 0.0)) * std::sin(u);
  };
  const std::vector<double> breaks{std::abs(z)};
  const std::complex<double> lhs(quad::adaptive(re, 0.0, c, tolerance, breaks),
                                 quad::adaptive(im, 0.0, c, tolerance, breaks));
  const std::complex<double> rhs(std::cos(z) - 1.0, std::sin(z) - z);
  return std::abs(lhs - rhs);
}

double verify_square_identity(std::span<const double> x,
                              std::span<const double> omega, double tolerance) {
  if (x.size() != omega.size()) throw UsageError("verify_square_identity: dimension mismatch");
  const double c = l1(omega);
  if (c == 0.0) throw UsageError("verify_square_identity: omega must be nonzero");
  const double w = dot(omega, x);
  const double p = w / c;
  auto pos2 = [](double u) { return u > 0.0 ? u * u : 0.0; };
  // (i/2)[(A - B) cos(ct) - i (A + B) sin(ct)] with A = (-p-t)_+^2, B = (p-t)_+^2
  auto re = [&](double t) { return 0.5 * (pos2(-p - t) + pos2(p - t)) * std::sin(c * t); };
  auto im = [&](double t) { return 0.5 * (pos2(-p - t) - pos2(p - t)) * std::cos(c * t); };
  const std::vector<double> breaks{std::abs(p)};
  const double c3 = c * c * c;
  const std::complex<double> lhs(c3 * quad::adaptive(re, 0.0, 1.0, tolerance, breaks),
                                 c3 * quad::adaptive(im, 0.0, 1.0, tolerance, breaks));
  const std::complex<double> rhs(std::cos(w) + 0.5 * w * w - 1.0, std::sin(w) - w);
  return std::abs(lhs - rhs);
}

}  // namespace ridge
