#pragma once

// Core value types for the open unit disk and its boundary circle, plus the
// radial-limit machinery shared by every other module: dyadic epsilon grids,
// Aitken extrapolation of radial limits, and disk automorphisms.
//
// Boundary approach is always radial and parametrized by eps = 1 - r, never
// by r itself: eps = 2^{-k} is exact in binary and 1 - r would lose all its
// low bits near the boundary.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "diskflow/errors.hpp"

namespace diskflow {

using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double t) {
  double w = std::fmod(t, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

/// Signed angular difference a - b reduced to (-pi, pi].
inline double angle_difference(double a, double b) {
  return std::remainder(a - b, two_pi);
}

/// A point of the open unit disk. Construction rejects |z| >= 1.
class DiskPoint {
 public:
  DiskPoint() : z_(0.0, 0.0) {}
  explicit DiskPoint(Complex z) : z_(z) {
    if (!(std::abs(z) < 1.0))
      throw argument_error("DiskPoint requires |z| < 1");
  }
  DiskPoint(double re, double im) : DiskPoint(Complex(re, im)) {}

  Complex value() const { return z_; }
  double re() const { return z_.real(); }
  double im() const { return z_.imag(); }

 private:
  Complex z_;
};

/// A point of the unit circle, stored as its angle so |x| = 1 holds exactly.
class BoundaryPoint {
 public:
  BoundaryPoint() : theta_(0.0) {}
  explicit BoundaryPoint(double theta) : theta_(wrap_angle(theta)) {}

  double angle() const { return theta_; }
  Complex unit() const { return Complex(std::cos(theta_), std::sin(theta_)); }

 private:
  double theta_;
};

/// A disk point written as (1-eps)*e^{i theta}. Keeping eps as the primitive
/// avoids the catastrophic cancellation of 1-r for r near 1.
struct RadialPoint {
  double theta = 0.0;
  double eps = 1.0;

  Complex boundary() const {
    return Complex(std::cos(theta), std::sin(theta));
  }
  Complex point() const { return (1.0 - eps) * boundary(); }
};

/// One sample of a function along a radius: eps = 1 - r and the value there.
struct RadialSample {
  double eps = 0.0;
  Complex value;
};

/// Result of extrapolating samples along a radius toward the boundary.
///
/// converged == true guarantees residual <= the configured tolerance and
/// `value` is the extrapolated limit. converged == false leaves the last raw
/// sample in `value`; divergence_exponent then estimates q in f ~ c*eps^{-q}
/// (0 when there is no evidence of growth).
struct RadialLimitEstimate {
  Complex value;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  double divergence_exponent = 0.0;
};

struct ExtrapolationOptions {
  double rel_tol = 1e-6;
  double abs_floor = 1e-12;
};

/// eps_k = 2^{-k} for k = k_min..k_max (strictly decreasing, exact dyadics).
inline std::vector<double> radial_grid(int k_min, int k_max) {
  if (k_min < 3 || k_max > 48 || k_min >= k_max)
    throw argument_error("radial_grid requires 3 <= k_min < k_max <= 48");
  std::vector<double> eps;
  eps.reserve(static_cast<std::size_t>(k_max - k_min) + 1);
  for (int k = k_min; k <= k_max; ++k) eps.push_back(std::ldexp(1.0, -k));
  return eps;
}

/// Extrapolates lim_{eps->0} f(eps) from samples with strictly decreasing
/// eps, fitting f(eps) = L + c*eps^q on successive triples (Aitken). The
/// residual is the relative spread of the last two triple-estimates.
inline RadialLimitEstimate extrapolate_radial_limit(
    std::span<const RadialSample> samples,
    const ExtrapolationOptions& opt = {}) {
  const std::size_t n = samples.size();
  if (n < 4) throw argument_error("extrapolate_radial_limit needs >= 4 samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(samples[i].eps < samples[i - 1].eps))
      throw argument_error("extrapolate_radial_limit needs strictly decreasing eps");

  RadialLimitEstimate est;

  // Aitken triple-estimates A_i from (f_{i-2}, f_{i-1}, f_i).
  std::vector<Complex> aitken;
  aitken.reserve(n - 2);
  for (std::size_t i = 2; i < n; ++i) {
    const Complex d1 = samples[i - 1].value - samples[i - 2].value;
    const Complex d2 = samples[i].value - samples[i - 1].value;
    const Complex den = d2 - d1;
    const double scale = std::abs(d1) + std::abs(d2);
    if (std::abs(den) > 1e-14 * scale && scale > 0.0) {
      aitken.push_back(samples[i].value - d2 * d2 / den);
    } else {
      // Plateau: successive differences are already at roundoff level.
      aitken.push_back(samples[i].value);
    }
  }

  const Complex last = aitken.back();
  const Complex prev = aitken[aitken.size() - 2];
  const double change = std::abs(last - prev);
  const double scale = std::max(std::abs(last), opt.abs_floor / opt.rel_tol);
  est.residual = change / scale;

  // Aitken applied to a geometrically diverging sequence reproduces the
  // model's constant term, so agreement of the triple-estimates alone is not
  // convergence: the raw samples must also contract toward the candidate, or
  // at least sit within the convergence tolerance of it (roundoff-scale
  // contamination can expand without carrying information).
  const double err_last = std::abs(samples[n - 1].value - last);
  const double err_before = std::abs(samples[n - 3].value - last);
  const bool contracting =
      err_last <= std::max({1.2 * err_before,
                            50.0 * change + opt.abs_floor * (1.0 + std::abs(last)),
                            opt.rel_tol * scale});

  if (est.residual <= opt.rel_tol && contracting) {
    est.value = last;
    est.converged = true;
    return est;
  }

  est.value = samples[n - 1].value;  // last raw sample, not an extrapolate
  est.converged = false;

  // Growth analysis over the tail: f ~ c*eps^{-q} has log|f| affine in
  // log(eps) with slope -q.
  const std::size_t window = std::min<std::size_t>(6, n - 1);
  const std::size_t start = n - 1 - window;
  bool monotone = true;
  double q_sum = 0.0;
  std::size_t q_count = 0;
  for (std::size_t i = start + 1; i < n; ++i) {
    const double lo = std::abs(samples[i - 1].value);
    const double hi = std::abs(samples[i].value);
    if (!(hi > lo) || lo == 0.0) {
      monotone = false;
      break;
    }
    q_sum += std::log(hi / lo) / std::log(samples[i - 1].eps / samples[i].eps);
    ++q_count;
  }
  if (monotone && q_count > 0 &&
      std::abs(samples[n - 1].value) >
          8.0 * std::max(std::abs(samples[start].value), 1e-300)) {
    est.divergence_exponent = q_sum / static_cast<double>(q_count);
  }
  return est;
}

/// Convenience: sample f on an eps grid and extrapolate.
template <class F>
RadialLimitEstimate extrapolate_on_grid(F&& f, std::span<const double> grid,
                                        const ExtrapolationOptions& opt = {}) {
  std::vector<RadialSample> samples;
  samples.reserve(grid.size());
  for (double eps : grid) samples.push_back({eps, Complex(f(eps))});
  return extrapolate_radial_limit(samples, opt);
}

/// Disk automorphism m(z) = (z - tau)/(1 - conj(tau) z) together with its
/// inverse; m(tau) = 0 and m^{-1}(0) = tau.
struct MoebiusPair {
  Complex tau;

  Complex forward(Complex z) const {
    return (z - tau) / (1.0 - std::conj(tau) * z);
  }
  Complex inverse(Complex w) const {
    return (w + tau) / (1.0 + std::conj(tau) * w);
  }
  /// Derivative of the forward map: (1 - |tau|^2) / (1 - conj(tau) z)^2.
  Complex forward_derivative(Complex z) const {
    const Complex d = 1.0 - std::conj(tau) * z;
    return (1.0 - std::norm(tau)) / (d * d);
  }
  Complex inverse_derivative(Complex w) const {
    const Complex d = 1.0 + std::conj(tau) * w;
    return (1.0 - std::norm(tau)) / (d * d);
  }
};

inline MoebiusPair moebius_to_origin(const DiskPoint& tau) {
  return MoebiusPair{tau.value()};
}

/// 1 - |w| computed without the cancellation of the naive expression when
/// |w| is close to 1: uses (1 - |w|^2)/(1 + |w|) with a fused 1 - re^2 - im^2.
inline double one_minus_abs(Complex w) {
  const double re = w.real(), im = w.imag();
  const double one_minus_sq = (1.0 - re) * (1.0 + re) - im * im;
  return one_minus_sq / (1.0 + std::abs(w));
}

}  // namespace diskflow
