#pragma once

// Positive finite Borel measures on the unit circle (atoms + absolutely
// continuous densities + power cusp profiles) and the machinery built on
// them: the Herglotz integral (1/2pi) int (e^{it}+z)/(e^{it}-z) dmu(t), its
// z-derivative, the radial pole criterion, the boundary L^2 Fatou test, and
// the cumulative function upsilon.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "diskflow/errors.hpp"
#include "diskflow/quadrature.hpp"
#include "diskflow/unitdisc.hpp"

namespace diskflow {

/// Cusp profile: upsilon(t) = -scale*(center-t)^alpha left of the center and
/// +scale*(t-center)^alpha right of it, hence a density
/// scale*alpha*|t-center|^{alpha-1} which is weakly singular when alpha < 1.
struct CuspProfile {
  double exponent;
  double center;
  double scale;

  static CuspProfile standard(double alpha, double center = std::numbers::pi) {
    if (!(alpha > 0.0)) throw argument_error("cusp exponent must be > 0");
    return CuspProfile{alpha, wrap_angle(center),
                       std::pow(std::numbers::pi, 1.0 - alpha)};
  }
};

class HerglotzMeasure {
 public:
  struct Atom {
    double angle;
    double mass;
  };
  /// upsilon has constant slope on [from, to]; density = slope there.
  struct StepPiece {
    double from;
    double to;
    double slope;
  };

  struct UniformDensity {
    double level;
  };
  struct StepDensity {
    std::vector<StepPiece> pieces;
  };
  using Density = std::variant<std::monostate, UniformDensity, StepDensity, CuspProfile>;

  static HerglotzMeasure atoms(std::vector<Atom> as) {
    return HerglotzMeasure(std::move(as), std::monostate{});
  }
  static HerglotzMeasure uniform(double level, std::vector<Atom> extra = {}) {
    if (!(level >= 0.0)) throw argument_error("uniform density level must be >= 0");
    return HerglotzMeasure(std::move(extra), UniformDensity{level});
  }
  static HerglotzMeasure step(std::vector<StepPiece> pieces,
                              std::vector<Atom> extra = {}) {
    return HerglotzMeasure(std::move(extra), StepDensity{std::move(pieces)});
  }
  static HerglotzMeasure power_cusp(const CuspProfile& cusp,
                                    std::vector<Atom> extra = {}) {
    return HerglotzMeasure(std::move(extra), cusp);
  }

  HerglotzMeasure(std::vector<Atom> as, Density density)
      : atoms_(std::move(as)), density_(std::move(density)) {
    for (auto& a : atoms_) {
      if (!(a.mass > 0.0)) throw argument_error("atom masses must be > 0");
      a.angle = wrap_angle(a.angle);
    }
    if (auto* st = std::get_if<StepDensity>(&density_)) {
      for (const auto& p : st->pieces) {
        if (!(p.from >= 0.0 && p.to <= two_pi && p.from < p.to))
          throw argument_error("step piece must satisfy 0 <= from < to <= 2pi");
        if (!(p.slope >= 0.0)) throw argument_error("step slopes must be >= 0");
      }
    }
    if (auto* c = std::get_if<CuspProfile>(&density_)) {
      if (!(c->exponent > 0.0 && c->scale > 0.0))
        throw argument_error("cusp profile needs exponent > 0 and scale > 0");
    }
    if (!(total_mass() > 0.0))
      throw argument_error("measure must have positive total mass");
  }

  const std::vector<Atom>& atom_list() const { return atoms_; }
  const Density& density() const { return density_; }
  bool quadrature_backed() const {
    return !std::holds_alternative<std::monostate>(density_);
  }

  double density_total() const {
    if (std::holds_alternative<std::monostate>(density_)) return 0.0;
    if (auto* u = std::get_if<UniformDensity>(&density_)) return u->level * two_pi;
    if (auto* st = std::get_if<StepDensity>(&density_)) {
      double m = 0.0;
      for (const auto& p : st->pieces) m += p.slope * (p.to - p.from);
      return m;
    }
    const auto& c = std::get<CuspProfile>(density_);
    return c.scale * (std::pow(c.center, c.exponent) +
                      std::pow(two_pi - c.center, c.exponent));
  }

  double total_mass() const {
    double m = density_total();
    for (const auto& a : atoms_) m += a.mass;
    return m;
  }

  /// Cumulative function: upsilon(0) = 0, nondecreasing,
  /// upsilon(2pi) = total mass. Jumps are right-continuous.
  double upsilon(double t) const {
    if (!(t >= 0.0 && t <= two_pi))
      throw argument_error("upsilon argument must lie in [0, 2pi]");
    if (t == 0.0) return 0.0;
    double v = 0.0;
    for (const auto& a : atoms_)
      if (a.angle <= t) v += a.mass;
    if (auto* u = std::get_if<UniformDensity>(&density_)) v += u->level * t;
    if (auto* st = std::get_if<StepDensity>(&density_)) {
      for (const auto& p : st->pieces)
        v += p.slope * std::max(0.0, std::min(t, p.to) - p.from);
    }
    if (auto* c = std::get_if<CuspProfile>(&density_)) {
      const double t0 = c->center;
      if (t <= t0)
        v += c->scale * (std::pow(t0, c->exponent) - std::pow(t0 - t, c->exponent));
      else
        v += c->scale * (std::pow(t0, c->exponent) + std::pow(t - t0, c->exponent));
    }
    return v;
  }

  /// Integral of f against the measure: atom sum in index order, then the
  /// density part by adaptive quadrature. The integrand receives the angle
  /// split as (base, offset) with t = base + offset; the cusp flanks keep
  /// the exact distance to the cusp center in `offset`, so kernels probing
  /// the center never lose it to the rounding of base + offset. `hints` are
  /// angles where the integrand is sharply peaked; `peak_angle` names the
  /// single sharpest one when the caller knows it.
  template <class F>
  Complex integrate(F&& f, std::span<const double> hints = {},
                    const QuadratureOptions& quad = {},
                    std::optional<double> peak_angle = {}) const {
    Complex acc(0.0, 0.0);
    for (const auto& a : atoms_) acc += a.mass * Complex(f(a.angle, 0.0));
    if (std::holds_alternative<std::monostate>(density_)) return acc;

    std::vector<double> splits;
    for (double h : hints) splits.push_back(wrap_angle(h));

    if (auto* u = std::get_if<UniformDensity>(&density_)) {
      if (u->level > 0.0) {
        auto g = [&](double t) { return u->level * Complex(f(t, 0.0)); };
        acc += integrate_segment(g, 0.0, two_pi, splits, quad).value;
      }
      return acc;
    }
    if (auto* st = std::get_if<StepDensity>(&density_)) {
      for (const auto& p : st->pieces) {
        auto g = [&](double t) { return p.slope * Complex(f(t, 0.0)); };
        acc += integrate_segment(g, p.from, p.to, splits, quad).value;
      }
      return acc;
    }

    // Power cusp: substitute u = |t - t0|^alpha near the center, which turns
    // scale*alpha*|t-t0|^{alpha-1} dt into scale*du and removes the
    // singularity. The substitution stays local: pow() jitters the flank
    // coordinate by ~1e-16*|t-t0|, which would smear a kernel peak sitting
    // far from the center, so the region around a declared peak is
    // integrated in plain t-space where angle differences are exact.
    const auto& c = std::get<CuspProfile>(density_);
    const double al = c.exponent;
    const double t0 = c.center;
    auto flank = [&](double length, double sign) -> Complex {
      if (length <= 0.0) return Complex(0.0, 0.0);

      // distance of the declared peak from the center along this flank
      double peak_d = -1.0;
      if (peak_angle) {
        const double d = wrap_angle(sign * (*peak_angle - t0));
        if (d <= length) peak_d = d;
      }
      // u-substitution window: the whole flank, unless a peak sits further
      // out than 2^-8, in which case stop halfway to it.
      double w = length;
      if (peak_d > 0x1p-8) w = std::min(length, 0.5 * peak_d);

      std::vector<double> usplits;
      for (double s : splits) {
        const double d = sign * (s - t0);
        if (d > 0.0 && d < w) usplits.push_back(std::pow(d, al));
      }
      auto g = [&](double u) {
        return c.scale * Complex(f(t0, sign * std::pow(u, 1.0 / al)));
      };
      Complex total =
          integrate_segment(g, 0.0, std::pow(w, al), usplits, quad).value;

      if (w < length) {
        // remainder of the flank in t-space; the density is smooth here
        const double a = sign > 0 ? t0 + w : t0 - length;
        const double b = sign > 0 ? t0 + length : t0 - w;
        std::vector<double> tsplits;
        for (double s : splits) {
          for (double cand : {s, s - two_pi, s + two_pi})
            if (cand > a && cand < b) tsplits.push_back(cand);
        }
        auto gt = [&](double t) {
          const double d = std::abs(t - t0);
          return c.scale * al * std::pow(d, al - 1.0) * Complex(f(t, 0.0));
        };
        total += integrate_segment(gt, a, b, tsplits, quad).value;
      }
      return total;
    };
    acc += flank(t0, -1.0);
    acc += flank(two_pi - t0, +1.0);
    return acc;
  }

 private:
  std::vector<Atom> atoms_;
  Density density_;
};

namespace detail {

/// (base + off) reduced into (-pi, pi] against the true period, carried in
/// double-double precision: the naive sum loses the low bits of `off`
/// exactly where the kernel peak sits (e.g. probing the antipode of a cusp
/// center, where base + off crosses 2pi).
inline double reduced_angle(double base, double off) {
  // TwoSum residue of base + off.
  const double s = base + off;
  const double bb = s - base;
  double err = (base - (s - bb)) + (off - bb);
  double hi = s;
  constexpr double kTwoPiHi = 6.283185307179586;       // nearest double to 2pi
  constexpr double kTwoPiLo = 2.4492935982947064e-16;  // 2pi - kTwoPiHi
  const double k = std::nearbyint(hi / kTwoPiHi);
  if (k != 0.0) {
    hi -= k * kTwoPiHi;
    err -= k * kTwoPiLo;
  }
  return hi + err;
}

/// e^{i delta} - (1 - eps) without cancellation in the real part.
inline Complex kernel_denominator(double delta, double eps) {
  const double s = std::sin(0.5 * delta);
  return Complex(eps - 2.0 * s * s, std::sin(delta));
}

/// e^{i delta} + (1 - eps).
inline Complex kernel_numerator(double delta, double eps) {
  const double cc = std::cos(0.5 * delta);
  return Complex(2.0 * cc * cc - eps, std::sin(delta));
}

/// |e^{it} - (1-eps) e^{i theta}|^2 = eps^2 + 4 (1-eps) sin^2(delta/2).
inline double boundary_distance_sq(double delta, double eps) {
  const double s = std::sin(0.5 * delta);
  return eps * eps + 4.0 * (1.0 - eps) * s * s;
}

/// Split points for an integrand peaked at `theta` with width `eps`: the
/// peak itself plus a geometric ladder out to O(1), so the adaptive
/// subdivision never has to bisect its way down 40 binary levels.
inline std::vector<double> radial_hints(double theta, double eps) {
  std::vector<double> h{theta};
  for (double d = eps; d < 3.5; d *= 4.0) {
    h.push_back(theta - d);
    h.push_back(theta + d);
  }
  return h;
}

}  // namespace detail

/// (1/2pi) int (e^{it}+z)/(e^{it}-z) dmu(t); real part >= 0 up to quadrature
/// slack. For z = 0 the kernel is identically 1 and the value is
/// total_mass/(2pi) exactly.
inline Complex herglotz_transform(const HerglotzMeasure& mu, Complex z,
                                  const QuadratureOptions& quad = {}) {
  if (!(std::abs(z) < 1.0))
    throw argument_error("herglotz_transform requires |z| < 1");
  if (z == Complex(0.0, 0.0)) return mu.total_mass() / two_pi;
  auto kernel = [&](double base, double off) {
    const double t = base + off;
    const Complex e(std::cos(t), std::sin(t));
    return (e + z) / (e - z);
  };
  const double eps = one_minus_abs(z);
  std::vector<double> hints;
  if (eps < 0.25) hints = detail::radial_hints(std::arg(z), eps);
  return mu.integrate(kernel, hints, quad) / two_pi;
}

/// Radial evaluation at (1-eps) e^{i theta}: kernel numerator/denominator are
/// formed from the angle difference and eps directly, so the transform keeps
/// full relative accuracy down to eps = 2^{-48}.
inline Complex herglotz_transform(const HerglotzMeasure& mu,
                                  const RadialPoint& zp,
                                  const QuadratureOptions& quad = {}) {
  auto kernel = [&](double base, double off) {
    const double delta = detail::reduced_angle(angle_difference(base, zp.theta), off);
    return detail::kernel_numerator(delta, zp.eps) /
           detail::kernel_denominator(delta, zp.eps);
  };
  return mu.integrate(kernel, detail::radial_hints(zp.theta, zp.eps), quad,
                      zp.theta) /
         two_pi;
}

/// (1/2pi) int 2 e^{it}/(e^{it}-z)^2 dmu(t), the z-derivative of the
/// transform under the integral sign.
inline Complex herglotz_transform_derivative(const HerglotzMeasure& mu,
                                             Complex z,
                                             const QuadratureOptions& quad = {}) {
  if (!(std::abs(z) < 1.0))
    throw argument_error("herglotz_transform_derivative requires |z| < 1");
  auto kernel = [&](double base, double off) {
    const double t = base + off;
    const Complex e(std::cos(t), std::sin(t));
    const Complex d = e - z;
    return 2.0 * e / (d * d);
  };
  const double eps = one_minus_abs(z);
  std::vector<double> hints;
  if (eps < 0.25) hints = detail::radial_hints(std::arg(z), eps);
  return mu.integrate(kernel, hints, quad) / two_pi;
}

inline Complex herglotz_transform_derivative(const HerglotzMeasure& mu,
                                             const RadialPoint& zp,
                                             const QuadratureOptions& quad = {}) {
  const Complex phase(std::cos(zp.theta), std::sin(zp.theta));
  auto kernel = [&](double base, double off) {
    const double delta = detail::reduced_angle(angle_difference(base, zp.theta), off);
    const Complex d = detail::kernel_denominator(delta, zp.eps);
    const Complex e(std::cos(delta), std::sin(delta));
    return 2.0 * e / (phase * d * d);
  };
  return mu.integrate(kernel, detail::radial_hints(zp.theta, zp.eps), quad,
                      zp.theta) /
         two_pi;
}

/// int dmu(t) / |e^{it} - (1-eps) e^{i theta}|^2 (the "energy" integral).
inline double energy_integral(const HerglotzMeasure& mu, double theta,
                              double eps, const QuadratureOptions& quad = {}) {
  auto f = [&](double base, double off) {
    const double delta = detail::reduced_angle(angle_difference(base, theta), off);
    return 1.0 / detail::boundary_distance_sq(delta, eps);
  };
  return mu.integrate(f, detail::radial_hints(theta, eps), quad, theta).real();
}

/// (1/eps) int sin(t-theta) / |e^{it} - (1-eps) e^{i theta}|^2 dmu(t).
inline double sine_integral(const HerglotzMeasure& mu, double theta,
                            double eps, const QuadratureOptions& quad = {}) {
  auto f = [&](double base, double off) {
    const double delta = detail::reduced_angle(angle_difference(base, theta), off);
    return std::sin(delta) / detail::boundary_distance_sq(delta, eps);
  };
  return mu.integrate(f, detail::radial_hints(theta, eps), quad, theta).real() /
         eps;
}

struct PoleCriterionOptions {
  int k_min = 3;
  int k_max = 24;
  double tol_sine = 1e-4;
  ExtrapolationOptions extrapolation{};
  QuadratureOptions quadrature{};
};

struct PoleCriterionResult {
  bool is_pole = false;
  RadialLimitEstimate energy;
  RadialLimitEstimate sine_term;
};

/// Radial criterion for a regular pole of the generator represented by mu:
/// the energy integral must converge as r -> 1 and the sine term must vanish
/// in the limit.
inline PoleCriterionResult pole_criterion(const HerglotzMeasure& mu,
                                          const BoundaryPoint& x,
                                          const PoleCriterionOptions& opt = {}) {
  const auto grid = radial_grid(opt.k_min, opt.k_max);
  std::vector<RadialSample> energy_samples, sine_samples;
  energy_samples.reserve(grid.size());
  sine_samples.reserve(grid.size());
  for (double eps : grid) {
    energy_samples.push_back(
        {eps, Complex(energy_integral(mu, x.angle(), eps, opt.quadrature))});
    sine_samples.push_back(
        {eps, Complex(sine_integral(mu, x.angle(), eps, opt.quadrature))});
  }
  PoleCriterionResult out;
  out.energy = extrapolate_radial_limit(energy_samples, opt.extrapolation);
  out.sine_term = extrapolate_radial_limit(sine_samples, opt.extrapolation);
  if (!out.sine_term.converged) {
    // The 1/eps factor amplifies quadrature noise; the exact-cancellation
    // case shows up as a uniformly tiny, noisy tail. A uniform bound below
    // half the decision threshold is accepted as convergence to zero.
    double tail_max = 0.0;
    for (std::size_t i = sine_samples.size() / 2; i < sine_samples.size(); ++i)
      tail_max = std::max(tail_max, std::abs(sine_samples[i].value));
    if (tail_max <= 0.5 * opt.tol_sine) {
      out.sine_term.value = tail_max;
      out.sine_term.residual = 0.0;
      out.sine_term.converged = true;
    }
  }
  out.is_pole = out.energy.converged && out.sine_term.converged &&
                std::abs(out.sine_term.value) <= opt.tol_sine;
  return out;
}

struct FatouL2Result {
  bool finite = false;
  std::vector<double> lower_bounds;
};

/// Evaluates int dmu(t)/|e^{it}-e^{i theta}|^2 directly on the boundary by
/// monotone window excision. finite == false certifies that theta is not a
/// regular pole; finite == true is inconclusive on its own.
inline FatouL2Result fatou_l2_test(const HerglotzMeasure& mu,
                                   const BoundaryPoint& x,
                                   const QuadratureOptions& quad = {}) {
  FatouL2Result out;
  const double theta = x.angle();
  for (const auto& a : mu.atom_list()) {
    if (angle_difference(a.angle, theta) == 0.0) {
      out.finite = false;
      out.lower_bounds = {std::numeric_limits<double>::infinity()};
      return out;
    }
  }

  auto excised = [&](double delta) {
    auto f = [&](double base, double off) -> Complex {
      const double d = detail::reduced_angle(angle_difference(base, theta), off);
      if (std::abs(d) <= delta) return Complex(0.0, 0.0);
      const double s = std::sin(0.5 * d);
      return Complex(1.0 / (4.0 * s * s), 0.0);
    };
    return mu.integrate(f, detail::radial_hints(theta, delta), quad, theta)
        .real();
  };

  for (int k = 2; k <= 26; ++k)
    out.lower_bounds.push_back(excised(std::numbers::pi * std::ldexp(1.0, -k)));

  // Increment-ratio test: shrinking increments mean a convergent tail;
  // steady or growing increments certify divergence.
  const auto& I = out.lower_bounds;
  std::vector<double> inc;
  for (std::size_t i = 1; i < I.size(); ++i) inc.push_back(I[i] - I[i - 1]);
  const double tail_scale = 1.0 + std::abs(I.back());
  double recent = 0.0;
  for (std::size_t i = inc.size() - 4; i < inc.size(); ++i) recent += inc[i];
  if (recent <= 1e-12 * tail_scale) {
    out.finite = true;  // increments already at roundoff: stabilized
    return out;
  }
  double ratio_sum = 0.0;
  int ratio_count = 0;
  for (std::size_t i = inc.size() - 3; i < inc.size(); ++i) {
    if (inc[i - 1] > 0.0) {
      ratio_sum += inc[i] / inc[i - 1];
      ++ratio_count;
    }
  }
  const double mean_ratio = ratio_count ? ratio_sum / ratio_count : 1.0;
  out.finite = mean_ratio < 0.9;
  return out;
}

/// Free-function form of the cumulative distribution of mu.
inline double upsilon(const HerglotzMeasure& mu, double t) {
  return mu.upsilon(t);
}

}  // namespace diskflow
