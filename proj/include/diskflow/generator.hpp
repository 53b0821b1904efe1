#pragma once

// Infinitesimal generators of holomorphic semigroups of the unit disk in
// Berkson-Porta form G(z) = (tau - z)(1 - conj(tau) z) p(z), where tau is the
// Denjoy-Wolff point and p is holomorphic with Re p >= 0. Provides duals
// (p -> 1/p), radial boundary classification into regular poles / regular
// null points, the Cowen-Pommerenke limit, and the pole mass budget.

#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diskflow/errors.hpp"
#include "diskflow/herglotz.hpp"
#include "diskflow/unitdisc.hpp"

namespace diskflow {

/// Evaluator for a Herglotz-class function p (Re p >= 0 on the disk).
/// The RadialPoint overload is the precision path used near the boundary.
class HerglotzFunction {
 public:
  virtual ~HerglotzFunction() = default;
  virtual Complex value(Complex z) const = 0;
  virtual Complex value(const RadialPoint& zp) const { return value(zp.point()); }
  virtual Complex derivative(Complex z) const = 0;
  virtual Complex derivative(const RadialPoint& zp) const {
    return derivative(zp.point());
  }
  virtual bool quadrature_backed() const { return false; }
};

using PFunction = std::shared_ptr<const HerglotzFunction>;

/// p identically equal to a constant with nonnegative real part.
class ConstantP final : public HerglotzFunction {
 public:
  explicit ConstantP(Complex c) : c_(c) {
    if (!(c.real() >= 0.0)) throw argument_error("constant p needs Re >= 0");
  }
  Complex value(Complex) const override { return c_; }
  Complex value(const RadialPoint&) const override { return c_; }
  Complex derivative(Complex) const override { return 0.0; }
  Complex derivative(const RadialPoint&) const override { return 0.0; }

 private:
  Complex c_;
};

/// p(z) = sum_j mu_j (a_j + z)/(a_j - z) with boundary atoms a_j = e^{i t_j}.
class AtomSumP final : public HerglotzFunction {
 public:
  explicit AtomSumP(std::vector<HerglotzMeasure::Atom> atoms)
      : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw argument_error("atom sum needs at least one atom");
    for (auto& a : atoms_) {
      if (!(a.mass > 0.0)) throw argument_error("atom masses must be > 0");
      a.angle = wrap_angle(a.angle);
    }
  }

  const std::vector<HerglotzMeasure::Atom>& atoms() const { return atoms_; }

  Complex value(Complex z) const override {
    Complex acc(0.0, 0.0);
    for (const auto& a : atoms_) {
      const Complex aj(std::cos(a.angle), std::sin(a.angle));
      acc += a.mass * (aj + z) / (aj - z);
    }
    return acc;
  }

  Complex value(const RadialPoint& zp) const override {
    Complex acc(0.0, 0.0);
    for (const auto& a : atoms_) {
      const double delta = angle_difference(a.angle, zp.theta);
      acc += a.mass * detail::kernel_numerator(delta, zp.eps) /
             detail::kernel_denominator(delta, zp.eps);
    }
    return acc;
  }

  Complex derivative(Complex z) const override {
    Complex acc(0.0, 0.0);
    for (const auto& a : atoms_) {
      const Complex aj(std::cos(a.angle), std::sin(a.angle));
      const Complex d = aj - z;
      acc += a.mass * 2.0 * aj / (d * d);
    }
    return acc;
  }

  Complex derivative(const RadialPoint& zp) const override {
    const Complex phase(std::cos(zp.theta), std::sin(zp.theta));
    Complex acc(0.0, 0.0);
    for (const auto& a : atoms_) {
      const double delta = angle_difference(a.angle, zp.theta);
      const Complex d = detail::kernel_denominator(delta, zp.eps);
      const Complex e(std::cos(delta), std::sin(delta));
      acc += a.mass * 2.0 * e / (phase * d * d);
    }
    return acc;
  }

 private:
  std::vector<HerglotzMeasure::Atom> atoms_;
};

/// p = 1/q for another Herglotz-class q (Re 1/q >= 0 whenever Re q >= 0).
class ReciprocalP final : public HerglotzFunction {
 public:
  explicit ReciprocalP(PFunction inner) : inner_(std::move(inner)) {}
  const PFunction& inner() const { return inner_; }

  Complex value(Complex z) const override { return 1.0 / inner_->value(z); }
  Complex value(const RadialPoint& zp) const override {
    return 1.0 / inner_->value(zp);
  }
  Complex derivative(Complex z) const override {
    const Complex q = inner_->value(z);
    return -inner_->derivative(z) / (q * q);
  }
  Complex derivative(const RadialPoint& zp) const override {
    const Complex q = inner_->value(zp);
    return -inner_->derivative(zp) / (q * q);
  }
  bool quadrature_backed() const override { return inner_->quadrature_backed(); }

 private:
  PFunction inner_;
};

/// p = 1/T where T is the Herglotz transform of a measure.
class MeasureBackedP final : public HerglotzFunction {
 public:
  explicit MeasureBackedP(HerglotzMeasure mu, QuadratureOptions quad = {})
      : mu_(std::move(mu)), quad_(quad) {
    if (!(mu_.total_mass() > 0.0))
      throw argument_error("measure-backed p needs positive total mass");
  }
  const HerglotzMeasure& measure() const { return mu_; }

  Complex value(Complex z) const override {
    return 1.0 / herglotz_transform(mu_, z, quad_);
  }
  Complex value(const RadialPoint& zp) const override {
    return 1.0 / herglotz_transform(mu_, zp, quad_);
  }
  Complex derivative(Complex z) const override {
    const Complex t = herglotz_transform(mu_, z, quad_);
    return -herglotz_transform_derivative(mu_, z, quad_) / (t * t);
  }
  Complex derivative(const RadialPoint& zp) const override {
    const Complex t = herglotz_transform(mu_, zp, quad_);
    return -herglotz_transform_derivative(mu_, zp, quad_) / (t * t);
  }
  bool quadrature_backed() const override { return true; }

 private:
  HerglotzMeasure mu_;
  QuadratureOptions quad_;
};

/// p conjugated by the automorphism moving an interior tau to the origin:
/// p_new(w) = (1 - |tau|^2) p(m^{-1}(w)). Used to reduce the interior-tau
/// Koenigs construction to the origin-based one.
class MoebiusConjugatedP final : public HerglotzFunction {
 public:
  MoebiusConjugatedP(PFunction inner, Complex tau)
      : inner_(std::move(inner)), m_{tau}, factor_(1.0 - std::norm(tau)) {}

  Complex value(Complex w) const override {
    return factor_ * inner_->value(m_.inverse(w));
  }
  Complex derivative(Complex w) const override {
    return factor_ * inner_->derivative(m_.inverse(w)) * m_.inverse_derivative(w);
  }
  bool quadrature_backed() const override { return inner_->quadrature_backed(); }

 private:
  PFunction inner_;
  MoebiusPair m_;
  double factor_;
};

enum class BoundaryTag { RegularPole, RegularNullPoint, Other, Inconclusive };

inline const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::RegularPole: return "pole";
    case BoundaryTag::RegularNullPoint: return "null_point";
    case BoundaryTag::Other: return "other";
    case BoundaryTag::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// Outcome of classifying one boundary point of a generator.
///   RegularPole:      a = lim G(z)(x - z), mass = |a| > tol_pole.
///   RegularNullPoint: dilation = lim G(z)/(z - x), real.
///   Other:            G has a finite limit along the radius (the
///                     Denjoy-Wolff point itself also reports Other).
struct BoundaryClassification {
  BoundaryTag tag = BoundaryTag::Inconclusive;
  Complex a;             // lim G(z)(x-z) when it exists
  double mass = 0.0;     // |a| for poles
  double dilation = 0.0; // Re of lim G(z)/(z-x) for null points
  double dilation_imag = 0.0;
  RadialLimitEstimate pole_estimate;
  RadialLimitEstimate null_estimate;
  RadialLimitEstimate value_estimate;
  std::string note;
};

struct ClassifyOptions {
  int k_min = 3;
  std::optional<int> k_max;  // default: 40 closed-form, 24 quadrature-backed
  double tol_pole = 1e-4;
  ExtrapolationOptions extrapolation{};
};

class Generator {
 public:
  /// Interior Denjoy-Wolff point.
  Generator(DiskPoint tau, PFunction p, std::string label = {})
      : tau_(tau.value()),
        boundary_tau_(false),
        tau_angle_(0.0),
        p_(std::move(p)),
        label_(std::move(label)) {
    validate();
  }

  /// Boundary Denjoy-Wolff point.
  Generator(BoundaryPoint tau, PFunction p, std::string label = {})
      : tau_(tau.unit()),
        boundary_tau_(true),
        tau_angle_(tau.angle()),
        p_(std::move(p)),
        label_(std::move(label)) {
    validate();
  }

  static Generator from_measure(DiskPoint tau, HerglotzMeasure mu,
                                std::string label = {}) {
    if (!(mu.total_mass() > 0.0))
      throw argument_error("from_measure requires positive total mass");
    return Generator(tau, std::make_shared<MeasureBackedP>(std::move(mu)),
                     std::move(label));
  }
  static Generator from_measure(BoundaryPoint tau, HerglotzMeasure mu,
                                std::string label = {}) {
    if (!(mu.total_mass() > 0.0))
      throw argument_error("from_measure requires positive total mass");
    return Generator(tau, std::make_shared<MeasureBackedP>(std::move(mu)),
                     std::move(label));
  }

  Complex tau() const { return tau_; }
  bool tau_on_boundary() const { return boundary_tau_; }
  double tau_angle() const { return tau_angle_; }
  const PFunction& p() const { return p_; }
  const std::string& label() const { return label_; }
  bool quadrature_backed() const { return p_->quadrature_backed(); }

  Complex p_value(Complex z) const { return p_->value(z); }
  Complex p_value(const RadialPoint& zp) const { return p_->value(zp); }

  Complex operator()(Complex z) const { return prefactor(z) * p_->value(z); }
  Complex operator()(const RadialPoint& zp) const {
    return prefactor(zp) * p_->value(zp);
  }

  /// G'(z) by the product rule; p' comes from the evaluator, not finite
  /// differences.
  Complex derivative(Complex z) const {
    const Complex tbar = std::conj(tau_);
    const Complex b = prefactor(z);
    const Complex bprime = -(1.0 - tbar * z) - tbar * (tau_ - z);
    return bprime * p_->value(z) + b * p_->derivative(z);
  }

  /// The dual generator: same Denjoy-Wolff point, p replaced by 1/p.
  /// Dualizing twice returns the original evaluator.
  Generator dual() const {
    PFunction q;
    if (auto rec = std::dynamic_pointer_cast<const ReciprocalP>(p_))
      q = rec->inner();
    else
      q = std::make_shared<ReciprocalP>(p_);
    Generator g = *this;
    g.p_ = std::move(q);
    g.label_ = label_.empty() ? std::string("dual") : label_ + "^";
    return g;
  }

  int default_k_max() const { return quadrature_backed() ? 24 : 40; }

 private:
  void validate() const {
    if (!p_) throw argument_error("generator requires a p evaluator");
    // Berkson-Porta requirement Re p >= 0, probed on a small polar grid.
    for (int ir = 1; ir <= 4; ++ir) {
      for (int it = 0; it < 8; ++it) {
        const double r = 0.22 * ir;
        const double t = two_pi * (it + 0.5) / 8.0;
        const Complex v = p_->value(Complex(r * std::cos(t), r * std::sin(t)));
        if (!(v.real() >= -1e-10))
          throw argument_error("p violates Re p >= 0 on the test grid");
      }
    }
  }

  Complex prefactor(Complex z) const {
    return (tau_ - z) * (1.0 - std::conj(tau_) * z);
  }

  /// (tau - z)(1 - conj(tau) z) at z = (1-eps) e^{i theta}, cancellation-free
  /// when tau lies on the boundary. With delta = theta - tau_angle both
  /// factors equal 1 - (1-eps) e^{i delta} up to the phase of tau:
  ///   tau - z = tau (1 - (1-eps) e^{i delta}),  1 - conj(tau) z = the same.
  Complex prefactor(const RadialPoint& zp) const {
    if (!boundary_tau_) return prefactor(zp.point());
    const double delta = angle_difference(zp.theta, tau_angle_);
    const Complex tau_phase(std::cos(tau_angle_), std::sin(tau_angle_));
    const double s = std::sin(0.5 * delta);
    const Complex om(2.0 * s * s + zp.eps * std::cos(delta),
                     -(1.0 - zp.eps) * std::sin(delta));
    return tau_phase * om * om;
  }

  Complex tau_;
  bool boundary_tau_;
  double tau_angle_;
  PFunction p_;
  std::string label_;
};

/// Three-stage radial classification of a boundary point.
inline BoundaryClassification classify_boundary(const Generator& G,
                                                const BoundaryPoint& x,
                                                const ClassifyOptions& opt = {}) {
  BoundaryClassification out;
  if (G.tau_on_boundary() &&
      std::abs(angle_difference(x.angle(), G.tau_angle())) < 1e-12) {
    out.tag = BoundaryTag::Other;
    out.note = "denjoy_wolff";
    return out;
  }

  const int k_max = opt.k_max.value_or(G.default_k_max());
  const auto grid = radial_grid(opt.k_min, k_max);
  const Complex unit = x.unit();

  std::vector<Complex> g_values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    g_values[i] = G(RadialPoint{x.angle(), grid[i]});

  // Stage 1: a = lim G(z)(x - z), with x - z = eps * x along the radius.
  // Poles of reciprocal-backed evaluators sit at zeros of the inner p, whose
  // angular placement is only exact to one ulp; the induced relative noise
  // ~1e-16/eps caps how deep the extrapolation may look.
  std::size_t n1 = grid.size();
  while (n1 > 4 && grid[n1 - 1] < 0x1p-28) --n1;
  std::vector<RadialSample> stage1(n1);
  for (std::size_t i = 0; i < n1; ++i)
    stage1[i] = {grid[i], g_values[i] * grid[i] * unit};
  out.pole_estimate = extrapolate_radial_limit(stage1, opt.extrapolation);
  if (out.pole_estimate.converged &&
      std::abs(out.pole_estimate.value) > opt.tol_pole) {
    out.tag = BoundaryTag::RegularPole;
    out.a = out.pole_estimate.value;
    out.mass = std::abs(out.a);
    return out;
  }

  // Stage 2: dilation = lim G(z)/(z - x) = lim -G(z)/(eps x). The division
  // by eps amplifies the angle-resolution floor (~1e-16/eps), so this stage
  // stops at eps = 2^{-26} even when stage 1 sampled deeper.
  std::size_t n2 = grid.size();
  while (n2 > 4 && grid[n2 - 1] < 0x1p-26) --n2;
  std::vector<RadialSample> stage2(n2);
  for (std::size_t i = 0; i < n2; ++i)
    stage2[i] = {grid[i], -g_values[i] / (grid[i] * unit)};
  out.null_estimate = extrapolate_radial_limit(stage2, opt.extrapolation);
  if (out.null_estimate.converged) {
    const Complex ell = out.null_estimate.value;
    out.a = out.pole_estimate.converged ? out.pole_estimate.value : Complex(0, 0);
    out.dilation = ell.real();
    out.dilation_imag = ell.imag();
    if (std::abs(ell.imag()) <= 1e-6 * (1.0 + std::abs(ell))) {
      out.tag = BoundaryTag::RegularNullPoint;
    } else {
      out.tag = BoundaryTag::Inconclusive;
      out.note = "dilation has a significant imaginary part";
    }
    return out;
  }

  // Stage 3: does G itself have a finite radial limit?
  std::vector<RadialSample> stage3(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    stage3[i] = {grid[i], g_values[i]};
  out.value_estimate = extrapolate_radial_limit(stage3, opt.extrapolation);
  out.tag = out.value_estimate.converged ? BoundaryTag::Other
                                         : BoundaryTag::Inconclusive;
  return out;
}

/// Cowen-Pommerenke limit L = lim (1/2) p(z) (1 - conj(x) z) along the
/// radius at x; equals mass/(2 |x - tau|^2) at regular poles.
inline double cowen_pommerenke_L(const Generator& G, const BoundaryPoint& x,
                                 const ClassifyOptions& opt = {}) {
  const int k_max = opt.k_max.value_or(G.default_k_max());
  const auto grid = radial_grid(opt.k_min, k_max);
  std::vector<RadialSample> samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // 1 - conj(x) z = eps exactly along the radius at x.
    const Complex p = G.p_value(RadialPoint{x.angle(), grid[i]});
    samples[i] = {grid[i], 0.5 * p * grid[i]};
  }
  auto est = extrapolate_radial_limit(samples, opt.extrapolation);
  return est.converged ? est.value.real() : 0.0;
}

struct PoleBudget {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// sum_j A_j / (2 |x_j - tau|^2) <= Re p(0) for regular poles x_j of mass A_j.
inline PoleBudget pole_budget_check(
    const Generator& G,
    std::span<const std::pair<BoundaryPoint, double>> poles) {
  PoleBudget out;
  for (const auto& [x, mass] : poles) {
    const double d2 = std::norm(x.unit() - G.tau());
    out.lhs += mass / (2.0 * d2);
  }
  out.rhs = G.p_value(Complex(0.0, 0.0)).real();
  out.holds = out.lhs <= out.rhs + 1e-8;
  return out;
}

}  // namespace diskflow
