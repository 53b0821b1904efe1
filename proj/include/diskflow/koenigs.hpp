#pragma once

// The Koenigs linearizing function h of a semigroup generator.
//
// Interior Denjoy-Wolff point (after conjugating tau to 0):
//   z h'(z)/h(z) = p(0)/p(z),  so  h(z) = z exp(q(z)) with
//   q(z) = int_0^1 (p(0)/p(sz) - 1) ds/s,  an analytic integrand.
// Boundary Denjoy-Wolff point:  h(z) = int_0^z dzeta / G(zeta).
//
// h' always comes from the defining identity (h'G = G'(tau) h resp.
// h'G = 1), never from numerical differentiation, and arg h along a radius
// is t + Im q with no branch tracking at all.

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "diskflow/errors.hpp"
#include "diskflow/generator.hpp"
#include "diskflow/quadrature.hpp"
#include "diskflow/unitdisc.hpp"

namespace diskflow {

enum class KoenigsRegime { Interior, Boundary };

namespace detail {

/// Geometric ladder of segment splits accumulating at s = 1, where the
/// integrand steepens when the target point approaches the boundary.
inline std::vector<double> segment_hints(double eps) {
  std::vector<double> splits;
  for (double d = std::max(eps, 1e-15); d < 1.0; d *= 4.0)
    splits.push_back(1.0 - d);
  splits.push_back(0.5);
  return splits;
}

}  // namespace detail

class KoenigsMap {
 public:
  explicit KoenigsMap(Generator G, QuadratureOptions quad = {})
      : generator_(std::move(G)), quad_(quad) {
    if (generator_.tau_on_boundary()) {
      regime_ = KoenigsRegime::Boundary;
      p_ = generator_.p();
      scale_ = 1.0;
    } else {
      regime_ = KoenigsRegime::Interior;
      const Complex tau = generator_.tau();
      if (std::abs(tau) == 0.0) {
        p_ = generator_.p();
        scale_ = 1.0;
      } else {
        p_ = std::make_shared<MoebiusConjugatedP>(generator_.p(), tau);
        scale_ = 1.0 - std::norm(tau);
      }
      moebius_ = MoebiusPair{tau};
      p0_ = p_->value(Complex(0.0, 0.0));
      g_prime_tau_ = -p0_;
    }
  }

  KoenigsRegime regime() const { return regime_; }
  const Generator& generator() const { return generator_; }
  /// G'(tau) for the interior regime.
  Complex g_prime_tau() const { return g_prime_tau_; }

  Complex h(Complex z) const {
    if (regime_ == KoenigsRegime::Boundary) return boundary_h(z);
    const Complex w = moebius_.forward(z);
    return scale_ * w * std::exp(interior_q(w));
  }

  Complex h(const RadialPoint& zp) const {
    if (regime_ == KoenigsRegime::Boundary) return boundary_h(zp);
    if (std::abs(generator_.tau()) == 0.0)
      return (1.0 - zp.eps) * zp.boundary() * std::exp(interior_q(zp));
    return h(zp.point());
  }

  Complex h_prime(Complex z) const {
    if (regime_ == KoenigsRegime::Boundary) return 1.0 / generator_(z);
    if (std::abs(z - generator_.tau()) < 1e-14) return 1.0;
    return g_prime_tau_ * h(z) / generator_(z);
  }

  Complex h_prime(const RadialPoint& zp) const {
    if (regime_ == KoenigsRegime::Boundary) return 1.0 / generator_(zp);
    return g_prime_tau_ * h(zp) / generator_(zp);
  }

  /// log |h| along a radius without forming exp(q); |h| blows up at null
  /// points and this keeps the asymptotics overflow-free.
  double log_abs_h(const RadialPoint& zp) const {
    if (regime_ == KoenigsRegime::Boundary)
      return std::log(std::abs(boundary_h(zp)));
    if (std::abs(generator_.tau()) == 0.0)
      return std::log1p(-zp.eps) + interior_q(zp).real();
    const Complex w = moebius_.forward(zp.point());
    return std::log(scale_) + std::log(std::abs(w)) + interior_q(w).real();
  }

  /// Continuous-branch argument of h along the radius at angle t.
  double arg_h(const RadialPoint& zp) const {
    if (regime_ != KoenigsRegime::Interior ||
        std::abs(generator_.tau()) != 0.0)
      throw argument_error("arg_h requires the interior regime with tau = 0");
    return zp.theta + interior_q(zp).imag();
  }

 private:
  /// q(w) = int_0^1 (p0/p(sw) - 1) ds/s along the segment [0, w].
  Complex interior_q(Complex w) const {
    const double eps = one_minus_abs(w);
    auto f = [&](double s) -> Complex {
      if (s == 0.0) return Complex(0.0, 0.0);
      return (p0_ / p_->value(s * w) - 1.0) / s;
    };
    return integrate_segment(f, 0.0, 1.0, detail::segment_hints(eps), quad_)
        .value;
  }

  /// Radial version: every node s*(1-eps)e^{i theta} is itself a radial
  /// point with eps_s = (1-s) + s*eps, so p keeps full accuracy near its
  /// boundary poles and zeros.
  Complex interior_q(const RadialPoint& zp) const {
    auto f = [&](double s) -> Complex {
      if (s == 0.0) return Complex(0.0, 0.0);
      const double eps_s = (1.0 - s) + s * zp.eps;
      return (p0_ / p_->value(RadialPoint{zp.theta, eps_s}) - 1.0) / s;
    };
    return integrate_segment(f, 0.0, 1.0, detail::segment_hints(zp.eps), quad_)
        .value;
  }

  Complex boundary_h(Complex z) const {
    auto f = [&](double s) -> Complex { return 1.0 / generator_(s * z); };
    const double eps = one_minus_abs(z);
    return z *
           integrate_segment(f, 0.0, 1.0, detail::segment_hints(eps), quad_)
               .value;
  }

  Complex boundary_h(const RadialPoint& zp) const {
    auto f = [&](double s) -> Complex {
      const double eps_s = (1.0 - s) + s * zp.eps;
      return 1.0 / generator_(RadialPoint{zp.theta, eps_s});
    };
    return (1.0 - zp.eps) * zp.boundary() *
           integrate_segment(f, 0.0, 1.0, detail::segment_hints(zp.eps), quad_)
               .value;
  }

  Generator generator_;
  QuadratureOptions quad_;
  KoenigsRegime regime_;
  PFunction p_;
  MoebiusPair moebius_{Complex(0.0, 0.0)};
  Complex p0_{1.0, 0.0};
  Complex g_prime_tau_{0.0, 0.0};
  double scale_ = 1.0;
};

inline KoenigsMap koenigs(const Generator& G, QuadratureOptions quad = {}) {
  return KoenigsMap(G, quad);
}

struct HBetaOptions {
  int k_min = 3;
  std::optional<int> k_max;  // default 20; h is quadrature-backed
  ExtrapolationOptions extrapolation{};
};

/// Beta-point report for the Koenigs function at a boundary point. The
/// verdict comes from the h-side evidence (|h'((1-eps)x)|/eps convergent),
/// compared against the generator-side classification by the caller.
struct HBetaReport {
  bool is_beta_point = false;
  Complex h_at_x;
  double beta_mass = 0.0;     // lim |h'(z)|/|x-z|
  Complex second_derivative;  // lim h'(z)/(z-x)
  Complex prediction;         // h(x) G'(tau)/A (interior) or 1/A (boundary)
  double prediction_mismatch = std::numeric_limits<double>::quiet_NaN();
  BoundaryTag generator_tag = BoundaryTag::Inconclusive;
  RadialLimitEstimate mass_estimate;
  RadialLimitEstimate value_estimate;
  RadialLimitEstimate dd_estimate;
};

inline HBetaReport h_beta_point(const KoenigsMap& K, const BoundaryPoint& x,
                                const HBetaOptions& opt = {},
                                const BoundaryClassification* known = nullptr) {
  HBetaReport rep;
  const Generator& G = K.generator();
  BoundaryClassification cls = known ? *known : classify_boundary(G, x);
  rep.generator_tag = cls.tag;
  if (cls.note == "denjoy_wolff") return rep;

  const int k_max = opt.k_max.value_or(20);
  const auto grid = radial_grid(opt.k_min, k_max);
  const Complex unit = x.unit();

  std::vector<RadialSample> mass_samples, value_samples, dd_samples;
  for (double eps : grid) {
    const RadialPoint zp{x.angle(), eps};
    const Complex hp = K.h_prime(zp);
    mass_samples.push_back({eps, Complex(std::abs(hp) / eps, 0.0)});
    value_samples.push_back({eps, K.h(zp)});
    dd_samples.push_back({eps, hp / (-eps * unit)});

    const std::size_t n = mass_samples.size();
    if (n >= 6) {
      bool growing = true;
      for (std::size_t i = n - 3; i < n; ++i)
        if (!(std::abs(mass_samples[i].value) >
              1.5 * std::abs(mass_samples[i - 1].value)))
          growing = false;
      if (growing && std::abs(mass_samples[n - 1].value) >
                         64.0 * std::abs(mass_samples[0].value))
        break;
    }
  }
  if (mass_samples.size() < 4) return rep;

  rep.mass_estimate = extrapolate_radial_limit(mass_samples, opt.extrapolation);
  rep.value_estimate = extrapolate_radial_limit(value_samples, opt.extrapolation);
  rep.dd_estimate = extrapolate_radial_limit(dd_samples, opt.extrapolation);

  rep.is_beta_point = rep.mass_estimate.converged &&
                      std::isfinite(rep.mass_estimate.value.real());
  if (!rep.is_beta_point) return rep;

  rep.beta_mass = rep.mass_estimate.value.real();
  rep.h_at_x = rep.value_estimate.value;
  rep.second_derivative = rep.dd_estimate.value;

  if (cls.tag == BoundaryTag::RegularPole) {
    const Complex A = -cls.a;  // lim G(z)(z-x)
    rep.prediction = (K.regime() == KoenigsRegime::Interior)
                         ? rep.h_at_x * K.g_prime_tau() / A
                         : 1.0 / A;
    rep.prediction_mismatch = std::abs(rep.second_derivative - rep.prediction) /
                              std::max(std::abs(rep.prediction), 1e-300);
  }
  return rep;
}

/// Carleson-Makarov beta-number of h(x) with respect to 0 in the star-like
/// case (tau = 0): 2 |h(x)| A for a pole of mass A at x.
inline double beta_number(const KoenigsMap& K, const BoundaryPoint& x,
                          const HBetaOptions& opt = {}) {
  if (K.regime() != KoenigsRegime::Interior ||
      std::abs(K.generator().tau()) != 0.0)
    throw argument_error("beta_number requires the interior regime with tau = 0");
  auto cls = classify_boundary(K.generator(), x);
  if (cls.tag != BoundaryTag::RegularPole)
    throw argument_error("beta_number requires a regular pole");
  auto rep = h_beta_point(K, x, opt, &cls);
  if (!rep.is_beta_point)
    throw numeric_error("beta_number: h-side limit did not converge");
  return 2.0 * std::abs(rep.h_at_x) * cls.mass;
}

struct NullAsymptotics {
  double rho = 0.0;              // log-growth exponent of h at the null point
  double rho_residual = 0.0;     // consistency spread of the rho fit
  double ell_check = 0.0;        // rho * dilation, contract: = 1
  Complex a_limit;               // h'(z)(z-x)/h(z) -> G'(tau)/ell  (interior)
                                 // h'(z)(z-x)      -> 1/ell        (boundary)
  Complex a_limit_expected;
  RadialLimitEstimate a_estimate;
  double h_divergence_exponent = 0.0;  // > 0 certifies |h| -> infinity
};

struct NullAsymptoticsOptions {
  int k_min = 4;
  std::optional<int> k_max;  // default 24
  ExtrapolationOptions extrapolation{};
};

/// Logarithmic asymptotics of h at a boundary regular null point x with
/// dilation ell > 0: the quotient of logarithms converges like 1/log(1/eps),
/// so rho is fitted linearly in u = 1/log(1/eps) (two-point Richardson at
/// the tail); the power-law a1/a2 limits use the ordinary extrapolator.
inline NullAsymptotics null_point_asymptotics(
    const KoenigsMap& K, const BoundaryPoint& x,
    const NullAsymptoticsOptions& opt = {}) {
  const Generator& G = K.generator();
  auto cls = classify_boundary(G, x);
  if (cls.tag != BoundaryTag::RegularNullPoint || !(cls.dilation > 0.0))
    throw argument_error(
        "null_point_asymptotics requires a regular null point with positive "
        "dilation");

  NullAsymptotics out;
  const int k_max = opt.k_max.value_or(24);
  const auto grid = radial_grid(opt.k_min, k_max);
  const Complex unit = x.unit();
  const bool interior = K.regime() == KoenigsRegime::Interior;

  // rho samples
  std::vector<double> rho_samples(grid.size());
  std::vector<RadialSample> habs_samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RadialPoint zp{x.angle(), grid[i]};
    const double log_eps = std::log(grid[i]);
    if (interior) {
      const double la = K.log_abs_h(zp);
      rho_samples[i] = la / (K.g_prime_tau().real() * log_eps);
      habs_samples[i] = {grid[i], Complex(std::exp(std::min(la, 700.0)), 0.0)};
    } else {
      const Complex hv = K.h(zp);
      rho_samples[i] = hv.real() / log_eps;
      habs_samples[i] = {grid[i], Complex(std::abs(hv), 0.0)};
    }
  }

  // Linear fit in u = 1/log(1/eps) through the tail and the midpoint.
  const std::size_t iN = grid.size() - 1;
  const std::size_t iM = grid.size() / 2;
  auto u_of = [&](std::size_t i) { return 1.0 / std::log(1.0 / grid[i]); };
  const double uN = u_of(iN), uM = u_of(iM);
  out.rho = (rho_samples[iN] * uM - rho_samples[iM] * uN) / (uM - uN);
  const double rho_alt = (rho_samples[iN - 1] * u_of(iM - 1) -
                          rho_samples[iM - 1] * u_of(iN - 1)) /
                         (u_of(iM - 1) - u_of(iN - 1));
  out.rho_residual = std::abs(out.rho - rho_alt);
  out.ell_check = out.rho * cls.dilation;

  // a1/a2 limits via the Koenigs evaluators.
  std::vector<RadialSample> a_samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RadialPoint zp{x.angle(), grid[i]};
    const Complex hp = K.h_prime(zp);
    const Complex zmx = -grid[i] * unit;  // z - x along the radius
    if (interior) {
      a_samples[i] = {grid[i], hp * zmx / K.h(zp)};
    } else {
      a_samples[i] = {grid[i], hp * zmx};
    }
  }
  out.a_estimate = extrapolate_radial_limit(a_samples, opt.extrapolation);
  out.a_limit = out.a_estimate.value;
  out.a_limit_expected = interior ? K.g_prime_tau() / cls.dilation
                                  : Complex(1.0 / cls.dilation, 0.0);

  auto habs_est = extrapolate_radial_limit(habs_samples, opt.extrapolation);
  out.h_divergence_exponent = habs_est.divergence_exponent;
  return out;
}

struct BoundaryArgumentOptions {
  int k_min = 3;
  int k_max = 16;
  ExtrapolationOptions extrapolation{};
};

/// upsilon(t) = lim_{r->1} arg h(r e^{it}), the boundary argument of the
/// star-like Koenigs image (interior regime, tau = 0).
inline RadialLimitEstimate boundary_argument(const KoenigsMap& K, double t,
                                             const BoundaryArgumentOptions& opt = {}) {
  if (K.regime() != KoenigsRegime::Interior ||
      std::abs(K.generator().tau()) != 0.0)
    throw argument_error("boundary_argument requires interior regime, tau = 0");
  const auto grid = radial_grid(opt.k_min, opt.k_max);
  std::vector<RadialSample> samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    samples[i] = {grid[i], Complex(K.arg_h(RadialPoint{wrap_angle(t), grid[i]}), 0.0)};
  return extrapolate_radial_limit(samples, opt.extrapolation);
}

}  // namespace diskflow
