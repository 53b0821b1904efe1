#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature for complex-valued integrands
// on real segments. Worst-interval-first subdivision with QUADPACK-style
// error estimates; callers may force initial split points where they know
// the integrand is rough (kernel peaks, density breakpoints, cusp flanks).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "diskflow/errors.hpp"
#include "diskflow/unitdisc.hpp"

namespace diskflow {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;   // additional absolute acceptance threshold
  int max_intervals = 8192;
};

struct QuadratureResult {
  Complex value;
  double error_estimate = 0.0;
  double abs_integral = 0.0;  // integral of |f| (resabs), for scaling
  int intervals = 1;
};

namespace detail {

// 15-point Kronrod abscissae/weights and the embedded 7-point Gauss weights.
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  Complex value;
  double error;
  double resabs;
  long seq;  // insertion order, ties broken deterministically
};

struct IntervalWorse {
  bool operator()(const Interval& lhs, const Interval& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.seq > rhs.seq;
  }
};

template <class F>
Interval gk15(F& f, double a, double b, long seq) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  const Complex fc = f(c);
  Complex resg = fc * gk15_wg[3];
  Complex resk = fc * gk15_wk[7];
  double resabs = std::abs(fc) * gk15_wk[7];

  Complex fv[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * gk15_x[j];
    const Complex f1 = f(c - dx);
    const Complex f2 = f(c + dx);
    fv[j] = f1 + f2;
    resk += gk15_wk[j] * fv[j];
    resabs += gk15_wk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += gk15_wg[j / 2] * fv[j];
  }

  const Complex reskh = resk * 0.5;
  double resasc = gk15_wk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += gk15_wk[j] * std::abs(fv[j] - 2.0 * reskh);

  const double ah = std::abs(h);
  double err = std::abs(resk - resg) * ah;
  resasc *= ah;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double round = 50.0 * std::numeric_limits<double>::epsilon() * resabs * ah;
  err = std::max(err, round);

  return Interval{a, b, resk * h, err, resabs * ah, seq};
}

}  // namespace detail

/// Integrates f over [a, b]; `splits` lists interior points that must start
/// as interval endpoints (values outside (a, b) are ignored).
template <class F>
QuadratureResult integrate_segment(F&& f, double a, double b,
                                   std::span<const double> splits = {},
                                   const QuadratureOptions& opt = {}) {
  QuadratureResult out;
  if (a == b) return out;

  std::vector<double> knots{a, b};
  for (double s : splits)
    if (s > a && s < b) knots.push_back(s);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  std::priority_queue<detail::Interval, std::vector<detail::Interval>,
                      detail::IntervalWorse>
      heap;
  long seq = 0;
  Complex total(0.0, 0.0);
  double total_err = 0.0;
  double total_abs = 0.0;
  int count = 0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    auto iv = detail::gk15(f, knots[i], knots[i + 1], seq++);
    total += iv.value;
    total_err += iv.error;
    total_abs += iv.resabs;
    heap.push(iv);
    ++count;
  }

  // The roundoff term keeps exactly-cancelling integrals feasible: their
  // value is ~0 while resabs stays O(1), and the per-interval error floors
  // sum to ~50 eps * resabs, which no amount of subdivision beats.
  auto accepted = [&]() {
    const double tol =
        std::max({opt.rel_tol * std::abs(total), opt.abs_tol,
                  1000.0 * std::numeric_limits<double>::epsilon() * total_abs});
    return total_err <= tol;
  };

  while (!accepted() && count < opt.max_intervals) {
    detail::Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at floating-point resolution; cannot refine further.
      heap.push(worst);
      break;
    }
    auto left = detail::gk15(f, worst.a, mid, seq++);
    auto right = detail::gk15(f, mid, worst.b, seq++);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_abs += left.resabs + right.resabs - worst.resabs;
    heap.push(left);
    heap.push(right);
    ++count;
  }

  if (!accepted())
    throw numeric_error("adaptive quadrature did not reach its tolerance",
                        total_err);

  out.value = total;
  out.error_estimate = total_err;
  out.abs_integral = total_abs;
  out.intervals = count;
  return out;
}

}  // namespace diskflow
