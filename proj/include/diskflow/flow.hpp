#pragma once

// Semigroup flow: integrates dz/dt = G(z) inside the unit disk with an
// embedded Dormand-Prince 5(4) pair, optionally carrying the variational
// factor v(t) = phi_t'(z0) via dv/dt = G'(z)v, v(0) = 1. On top of the
// integrator: semigroup/flow-identity residual checks, beta-point reports
// for phi_t, and the boundary dilatation coefficient.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "diskflow/errors.hpp"
#include "diskflow/generator.hpp"
#include "diskflow/unitdisc.hpp"

namespace diskflow {

struct FlowOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  long max_steps = 2'000'000;
  bool record = true;  // keep per-step samples in the trajectory
  bool with_variational = false;
};

struct TrajectorySample {
  double t;
  Complex z;
  Complex v;
};

struct Trajectory {
  Complex z0;
  double t_end = 0.0;
  Complex final_z;
  Complex final_v{1.0, 0.0};
  std::vector<TrajectorySample> samples;  // empty unless options.record
  long steps_accepted = 0;
  long steps_rejected = 0;
  double max_local_error = 0.0;
};

/// Step underflow or containment failure; carries what was integrated.
class flow_error : public numeric_error {
 public:
  flow_error(const std::string& what, Trajectory partial)
      : numeric_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

namespace detail {

struct FlowState {
  Complex z;
  Complex v;
};

// Dormand-Prince 5(4) coefficients.
inline constexpr double dp_c[7] = {0.0,     1.0 / 5, 3.0 / 10, 4.0 / 5,
                                   8.0 / 9, 1.0,     1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double dp_err[7] = {
    71.0 / 57600,  0.0,           -71.0 / 16695, 71.0 / 1920,
    -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace detail

/// Integrates the flow of G from z0 up to t_end.
inline Trajectory flow(const Generator& G, const DiskPoint& z0, double t_end,
                       const FlowOptions& opt = {}) {
  if (!(t_end >= 0.0)) throw argument_error("flow requires t_end >= 0");

  Trajectory traj;
  traj.z0 = z0.value();
  traj.final_z = z0.value();
  traj.t_end = t_end;
  if (opt.record) traj.samples.push_back({0.0, z0.value(), Complex(1.0, 0.0)});
  if (t_end == 0.0) return traj;

  detail::FlowState y{z0.value(), Complex(1.0, 0.0)};
  auto rhs = [&](const detail::FlowState& s) {
    detail::FlowState d;
    d.z = G(s.z);
    d.v = opt.with_variational ? G.derivative(s.z) * s.v : Complex(0.0, 0.0);
    return d;
  };

  double t = 0.0;
  const double eps0 = one_minus_abs(y.z);
  const double g0 = std::abs(G(y.z));
  double h = std::min({t_end, 0.05, eps0 / (10.0 * std::max(g0, 1e-30))});
  h = std::max(h, 1e-300);

  detail::FlowState k[7];
  k[0] = rhs(y);
  double err_prev = 1.0;

  while (t < t_end) {
    if (traj.steps_accepted + traj.steps_rejected > opt.max_steps) {
      traj.final_z = y.z;
      traj.final_v = y.v;
      throw flow_error("flow exceeded the step budget", std::move(traj));
    }
    const bool last = (t + h >= t_end);
    if (last) h = t_end - t;

    for (int i = 1; i < 7; ++i) {
      detail::FlowState s = y;
      for (int j = 0; j < i; ++j) {
        const double a = detail::dp_a[i][j];
        if (a == 0.0) continue;
        s.z += h * a * k[j].z;
        s.v += h * a * k[j].v;
      }
      k[i] = rhs(s);
    }
    // FSAL: stage 7 state is the 5th-order solution.
    detail::FlowState ynew = y;
    for (int j = 0; j < 6; ++j) {
      const double a = detail::dp_a[6][j];
      if (a == 0.0) continue;
      ynew.z += h * a * k[j].z;
      ynew.v += h * a * k[j].v;
    }
    k[6] = rhs(ynew);

    Complex ez(0.0, 0.0), ev(0.0, 0.0);
    for (int j = 0; j < 7; ++j) {
      ez += detail::dp_err[j] * k[j].z;
      ev += detail::dp_err[j] * k[j].v;
    }
    ez *= h;
    ev *= h;

    // Mixed control for z; pure relative control for v, which can span many
    // orders of magnitude along one trajectory.
    double err = std::abs(ez) / (opt.abs_tol + opt.rel_tol * std::abs(ynew.z));
    if (opt.with_variational) {
      const double vscale = opt.rel_tol * std::max(std::abs(ynew.v), 1e-290);
      err = std::max(err, std::abs(ev) / vscale);
    }

    const bool contained = std::abs(ynew.z) < 1.0 - 1e-15;
    if (err <= 1.0 && contained) {
      t = last ? t_end : t + h;
      y = ynew;
      k[0] = k[6];
      ++traj.steps_accepted;
      traj.max_local_error = std::max(traj.max_local_error, err * opt.rel_tol);
      if (opt.record) traj.samples.push_back({t, y.z, y.v});
      const double grow =
          0.9 * std::pow(std::max(err, 1e-10), -0.17) * std::pow(err_prev, 0.08);
      err_prev = std::max(err, 1e-10);
      h *= std::clamp(grow, 0.2, 6.0);
      h = std::min(h, t_end - t + 1e-300);
    } else {
      ++traj.steps_rejected;
      h *= contained ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.7) : 0.5;
      if (h < 1e-14 && t + h <= t) {
        traj.final_z = y.z;
        traj.final_v = y.v;
        throw flow_error("flow step size underflow", std::move(traj));
      }
    }
  }

  traj.final_z = y.z;
  traj.final_v = y.v;
  return traj;
}

/// phi_t(z0) without trajectory recording.
inline Complex flow_point(const Generator& G, Complex z0, double t,
                          const FlowOptions& base = {}) {
  FlowOptions opt = base;
  opt.record = false;
  opt.with_variational = false;
  return flow(G, DiskPoint(z0), t, opt).final_z;
}

/// |phi_{t+s}(z0) - phi_t(phi_s(z0))|.
inline double check_semigroup_property(const Generator& G, const DiskPoint& z0,
                                       double t, double s,
                                       const FlowOptions& base = {}) {
  if (!(t >= 0.0 && s >= 0.0))
    throw argument_error("semigroup check requires t, s >= 0");
  FlowOptions opt = base;
  opt.record = false;
  opt.with_variational = false;
  const Complex direct = flow(G, z0, t + s, opt).final_z;
  const Complex inner = flow(G, z0, s, opt).final_z;
  const Complex composed = flow(G, DiskPoint(inner), t, opt).final_z;
  return std::abs(direct - composed);
}

/// |phi_t'(z0) G(z0) - G(phi_t(z0))|.
inline double check_diffeq_identity(const Generator& G, const DiskPoint& z0,
                                    double t, const FlowOptions& base = {}) {
  FlowOptions opt = base;
  opt.record = false;
  opt.with_variational = true;
  const Trajectory traj = flow(G, z0, t, opt);
  return std::abs(traj.final_v * G(z0.value()) - G(traj.final_z));
}

struct RadialFlowOptions {
  int k_min = 3;
  int k_max = 18;
  FlowOptions flow{1e-12, 1e-12, 2'000'000, false, true};
  ExtrapolationOptions extrapolation{};
};

/// Beta-point report for phi_t at a boundary point x. The verdict comes from
/// the flow evidence (does |phi_t'((1-eps)x)|/eps converge?) so that it can
/// be compared independently against the generator-side classification.
struct PhiBetaReport {
  double t = 0.0;
  bool is_beta_point = false;
  Complex sigma_t;                 // extrapolated angular limit of phi_t
  double beta_mass = 0.0;          // lim |phi_t'(z)| / |x - z|
  Complex second_derivative;       // lim phi_t'(z)/(z - x)
  Complex prediction;              // G(sigma_t)/A when x is a regular pole
  double prediction_mismatch = std::numeric_limits<double>::quiet_NaN();
  BoundaryTag generator_tag = BoundaryTag::Inconclusive;
  RadialLimitEstimate mass_estimate;
  RadialLimitEstimate sigma_estimate;
  RadialLimitEstimate dd_estimate;
};

inline PhiBetaReport phi_beta_point(const Generator& G, const BoundaryPoint& x,
                                    double t,
                                    const RadialFlowOptions& opt = {},
                                    const BoundaryClassification* known = nullptr) {
  if (!(t > 0.0)) throw argument_error("phi_beta_point requires t > 0");
  PhiBetaReport rep;
  rep.t = t;

  BoundaryClassification cls =
      known ? *known : classify_boundary(G, x);
  rep.generator_tag = cls.tag;

  const auto grid = radial_grid(opt.k_min, opt.k_max);
  const Complex unit = x.unit();

  std::vector<RadialSample> mass_samples, sigma_samples, dd_samples;
  try {
    for (double eps : grid) {
      const Complex z0 = (1.0 - eps) * unit;
      const Trajectory traj = flow(G, DiskPoint(z0), t, opt.flow);
      mass_samples.push_back({eps, Complex(std::abs(traj.final_v) / eps, 0.0)});
      sigma_samples.push_back({eps, traj.final_z});
      dd_samples.push_back({eps, traj.final_v / (-eps * unit)});

      // Early exit once divergence of |v|/eps is unambiguous.
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
  } catch (const flow_error&) {
    if (mass_samples.size() < 4) return rep;  // inconclusive
  }

  if (mass_samples.size() >= 4) {
    rep.mass_estimate = extrapolate_radial_limit(mass_samples, opt.extrapolation);
    rep.sigma_estimate = extrapolate_radial_limit(sigma_samples, opt.extrapolation);
    rep.dd_estimate = extrapolate_radial_limit(dd_samples, opt.extrapolation);
  }

  rep.is_beta_point = rep.mass_estimate.converged &&
                      std::isfinite(rep.mass_estimate.value.real());
  if (!rep.is_beta_point) return rep;

  rep.beta_mass = rep.mass_estimate.value.real();
  rep.sigma_t = rep.sigma_estimate.value;
  rep.second_derivative = rep.dd_estimate.value;

  if (cls.tag == BoundaryTag::RegularPole) {
    const Complex A = -cls.a;  // lim G(z)(z - x)
    rep.prediction = G(rep.sigma_t) / A;
    rep.prediction_mismatch = std::abs(rep.second_derivative - rep.prediction) /
                              std::max(std::abs(rep.prediction), 1e-300);
  }
  return rep;
}

struct DilatationOptions {
  int k_min = 4;
  int k_max = 14;
  ExtrapolationOptions extrapolation{};
};

/// Boundary dilatation coefficient of a self-map f along the radius at x:
/// lim (1 - |f((1-eps)x)|) / eps. Infinite coefficients come back as a
/// non-converged estimate with a positive divergence exponent.
template <class MapEval>
RadialLimitEstimate dilatation_coefficient(MapEval&& f, const BoundaryPoint& x,
                                           const DilatationOptions& opt = {}) {
  const auto grid = radial_grid(opt.k_min, opt.k_max);
  std::vector<RadialSample> samples;
  samples.reserve(grid.size());
  for (double eps : grid) {
    const Complex w = f(RadialPoint{x.angle(), eps});
    samples.push_back({eps, Complex(one_minus_abs(w) / eps, 0.0)});
  }
  return extrapolate_radial_limit(samples, opt.extrapolation);
}

/// phi_t as a map evaluator (for dilatation and composition-law checks).
inline auto semigroup_map(const Generator& G, double t,
                          FlowOptions opt = {1e-12, 1e-12, 2'000'000, false, false}) {
  opt.record = false;
  opt.with_variational = false;
  return [&G, t, opt](const RadialPoint& zp) {
    return flow(G, DiskPoint(zp.point()), t, opt).final_z;
  };
}

}  // namespace diskflow
