#pragma once

// Closed-form reference maps used as independent oracles by the test and
// acceptance suites. Everything here is evaluated directly from rational
// expressions and stays independent of the library's numerical paths.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "diskflow/generator.hpp"
#include "diskflow/unitdisc.hpp"

namespace oracles {

using diskflow::Complex;

// ----- Koebe semigroup: G(z) = -z(1-z)/(1+z), h = k(z) = z/(1-z)^2 -----

inline Complex koebe_G(Complex z) { return -z * (1.0 - z) / (1.0 + z); }

inline Complex koebe_k(Complex z) { return z / ((1.0 - z) * (1.0 - z)); }

inline Complex koebe_k_prime(Complex z) {
  const Complex d = 1.0 - z;
  return (1.0 + z) / (d * d * d);
}

// Inverse of k on the slit plane, branch fixed by k^{-1}(0) = 0; the form
// 2w / (1 + 2w + sqrt(1+4w)) avoids cancellation near w = 0.
inline Complex koebe_k_inverse(Complex w) {
  const Complex s = std::sqrt(Complex(1.0, 0.0) + 4.0 * w);
  return 2.0 * w / (1.0 + 2.0 * w + s);
}

inline Complex koebe_phi(double t, Complex z) {
  return koebe_k_inverse(std::exp(-t) * koebe_k(z));
}

// ----- Half-plane semigroup: tau = 1, p = 1, G = (1-z)^2, h = z/(1-z) -----

inline Complex halfplane_G(Complex z) { return (1.0 - z) * (1.0 - z); }

inline Complex halfplane_phi(double t, Complex z) {
  const Complex u = t * (1.0 - z);
  return (z + u) / (1.0 + u);
}

inline Complex halfplane_h(Complex z) { return z / (1.0 - z); }

// ----- Two-slit semigroup: p = (1+z^2)/(1-z^2), h = z/(1+z^2) -----

inline Complex twoslit_p(Complex z) {
  return (1.0 + z * z) / (1.0 - z * z);
}

inline Complex twoslit_G(Complex z) { return -z * twoslit_p(z); }

inline Complex twoslit_h(Complex z) { return z / (1.0 + z * z); }

// Branch with h^{-1}(0) = 0, analytic off the two boundary slits.
inline Complex twoslit_h_inverse(Complex w) {
  const Complex s = std::sqrt(Complex(1.0, 0.0) - 4.0 * w * w);
  return 2.0 * w / (1.0 + s);
}

inline Complex twoslit_phi(double t, Complex z) {
  return twoslit_h_inverse(std::exp(-t) * twoslit_h(z));
}

// ----- library generators for the oracle semigroups -----

inline diskflow::Generator koebe_generator() {
  return diskflow::Generator(
      diskflow::DiskPoint(0.0, 0.0),
      std::make_shared<diskflow::AtomSumP>(
          std::vector<diskflow::HerglotzMeasure::Atom>{{std::numbers::pi, 1.0}}),
      "koebe");
}

inline diskflow::Generator halfplane_generator() {
  return diskflow::Generator(diskflow::BoundaryPoint(0.0),
                             std::make_shared<diskflow::ConstantP>(Complex(1.0, 0.0)),
                             "halfplane");
}

inline diskflow::Generator twoslit_generator() {
  return diskflow::Generator(
      diskflow::DiskPoint(0.0, 0.0),
      std::make_shared<diskflow::AtomSumP>(
          std::vector<diskflow::HerglotzMeasure::Atom>{{0.0, 0.5},
                                                       {std::numbers::pi, 0.5}}),
      "two_slit");
}

// ----- seeded rational generator family -----

struct SeededGenerator {
  diskflow::Generator G;
  std::vector<diskflow::HerglotzMeasure::Atom> atoms;  // poles of p
};

// Atom angles sit on the 720-point probe grid so that the probe sweep hits
// each pole exactly; minimum index gap keeps the poles well separated.
inline std::vector<SeededGenerator> seeded_generators(int count = 12,
                                                      unsigned seed = 885623u) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> natoms(1, 6);
  std::uniform_real_distribution<double> mass(0.2, 1.0);
  std::uniform_int_distribution<int> slot(0, 719);

  std::vector<SeededGenerator> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int m = natoms(rng);
    std::vector<int> slots;
    while (static_cast<int>(slots.size()) < m) {
      const int s = slot(rng);
      bool ok = true;
      for (int other : slots) {
        const int d = std::abs(s - other);
        if (std::min(d, 720 - d) < 20) ok = false;
      }
      if (ok) slots.push_back(s);
    }
    std::vector<diskflow::HerglotzMeasure::Atom> atoms;
    double total = 0.0;
    for (int s : slots) {
      const double mu = mass(rng);
      atoms.push_back({diskflow::two_pi * s / 720.0, mu});
      total += mu;
    }
    for (auto& a : atoms) a.mass /= total;

    auto p = std::make_shared<diskflow::AtomSumP>(atoms);
    // Denjoy-Wolff points: mostly the origin, two interior, two boundary.
    if (i == 4) {
      out.push_back({diskflow::Generator(diskflow::DiskPoint(0.3, 0.2), p,
                                         "seeded-" + std::to_string(i)),
                     atoms});
    } else if (i == 9) {
      out.push_back({diskflow::Generator(diskflow::DiskPoint(-0.35, 0.1), p,
                                         "seeded-" + std::to_string(i)),
                     atoms});
    } else if (i == 5 || i == 10) {
      // boundary tau strictly between grid points
      const double ang = diskflow::two_pi * (slot(rng) + 0.4371) / 720.0;
      bool clash = false;
      for (const auto& a : atoms)
        if (std::abs(diskflow::angle_difference(a.angle, ang)) < 0.05) clash = true;
      if (clash) {
        out.push_back({diskflow::Generator(diskflow::DiskPoint(0.0, 0.0), p,
                                           "seeded-" + std::to_string(i)),
                       atoms});
      } else {
        out.push_back({diskflow::Generator(diskflow::BoundaryPoint(ang), p,
                                           "seeded-" + std::to_string(i)),
                       atoms});
      }
    } else {
      out.push_back({diskflow::Generator(diskflow::DiskPoint(0.0, 0.0), p,
                                         "seeded-" + std::to_string(i)),
                     atoms});
    }
  }
  return out;
}

}  // namespace oracles
