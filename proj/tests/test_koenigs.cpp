#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "diskflow/flow.hpp"
#include "diskflow/koenigs.hpp"
#include "oracles.hpp"

using namespace diskflow;
using Catch::Approx;

namespace {

Generator linear_generator() {
  return Generator(DiskPoint(0.0, 0.0),
                   std::make_shared<ConstantP>(Complex(1.0, 0.0)), "-z");
}

Generator boundary_null_generator() {
  // tau on the boundary away from the p-atoms at +-i; p = (1-z^2)/(1+z^2)
  // has zeros at +-1, which become boundary regular null points of G.
  return Generator(BoundaryPoint(2.0),
                   std::make_shared<AtomSumP>(std::vector<HerglotzMeasure::Atom>{
                       {std::numbers::pi / 2.0, 0.5},
                       {3.0 * std::numbers::pi / 2.0, 0.5}}),
                   "boundary-null");
}

}  // namespace

TEST_CASE("koenigs maps of the oracle semigroups") {
  SECTION("linear field: h is the identity") {
    auto K = koenigs(linear_generator());
    CHECK(K.regime() == KoenigsRegime::Interior);
    for (Complex z : {Complex(0.3, 0.4), Complex(-0.7, 0.1)})
      CHECK(std::abs(K.h(z) - z) < 1e-12);
  }

  SECTION("Koebe: h(z) = z/(1-z)^2, h(1/2) = 2") {
    auto K = koenigs(oracles::koebe_generator());
    CHECK(std::abs(K.h(Complex(0.5, 0.0)) - Complex(2.0, 0.0)) < 1e-9);
    for (Complex z : {Complex(0.3, 0.2), Complex(-0.5, 0.4), Complex(0.0, -0.6)})
      CHECK(std::abs(K.h(z) - oracles::koebe_k(z)) < 1e-9 * (1.0 + std::abs(oracles::koebe_k(z))));
  }

  SECTION("half-plane: h(z) = z/(1-z), h(1/2) = 1") {
    auto K = koenigs(oracles::halfplane_generator());
    CHECK(K.regime() == KoenigsRegime::Boundary);
    CHECK(std::abs(K.h(Complex(0.5, 0.0)) - Complex(1.0, 0.0)) < 1e-9);
    for (Complex z : {Complex(0.2, 0.3), Complex(-0.6, -0.2)})
      CHECK(std::abs(K.h(z) - oracles::halfplane_h(z)) < 1e-9);
  }

  SECTION("two-slit: h(z) = z/(1+z^2)") {
    auto K = koenigs(oracles::twoslit_generator());
    for (Complex z : {Complex(0.4, 0.1), Complex(-0.2, 0.5)})
      CHECK(std::abs(K.h(z) - oracles::twoslit_h(z)) < 1e-9);
  }
}

TEST_CASE("h satisfies its defining differential identity") {
  // h' comes from the identity, so the meaningful check is that h itself
  // varies accordingly: compare h' against central differences of h.
  const double step = 1e-6;
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> rad(0.05, 0.85), ang(0.0, two_pi);

  auto check_fd = [&](const KoenigsMap& K, int n) {
    for (int i = 0; i < n; ++i) {
      const double r = rad(rng), t = ang(rng);
      const Complex z(r * std::cos(t), r * std::sin(t));
      const Complex fd = (K.h(z + step) - K.h(z - step)) / (2.0 * step);
      const Complex hp = K.h_prime(z);
      CHECK(std::abs(hp - fd) <= 2e-6 * (1.0 + std::abs(hp)));
    }
  };

  check_fd(koenigs(oracles::koebe_generator()), 8);
  check_fd(koenigs(oracles::halfplane_generator()), 8);
  check_fd(koenigs(oracles::twoslit_generator()), 8);
}

TEST_CASE("koenigs normalization at the denjoy-wolff point") {
  SECTION("interior tau != 0: h(tau) = 0, h'(tau) = 1") {
    auto G = Generator(DiskPoint(0.3, 0.2),
                       std::make_shared<AtomSumP>(
                           std::vector<HerglotzMeasure::Atom>{{2.1, 0.6}, {5.0, 0.4}}));
    auto K = koenigs(G);
    const Complex tau(0.3, 0.2);
    CHECK(std::abs(K.h(tau)) < 1e-12);
    const double step = 1e-6;
    const Complex fd = (K.h(tau + step) - K.h(tau - step)) / (2.0 * step);
    CHECK(std::abs(fd - 1.0) < 1e-8);
    CHECK(std::abs(K.g_prime_tau() - G.derivative(tau)) < 1e-12);
  }

  SECTION("boundary regime: h(0) = 0") {
    auto K = koenigs(oracles::halfplane_generator());
    CHECK(std::abs(K.h(Complex(0.0, 0.0))) < 1e-14);
  }
}

TEST_CASE("h is injective on sampled pairs") {
  auto K = koenigs(oracles::twoslit_generator());
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> rad(0.0, 0.9), ang(0.0, two_pi);
  for (int i = 0; i < 200; ++i) {
    const Complex z1 = rad(rng) * std::polar(1.0, ang(rng));
    const Complex z2 = rad(rng) * std::polar(1.0, ang(rng));
    if (std::abs(z1 - z2) < 1e-6) continue;
    CHECK(std::abs(K.h(z1) - K.h(z2)) > 1e-12);
  }
}

TEST_CASE("linearization ties the flow to the koenigs map") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> rad(0.0, 0.8), ang(0.0, two_pi);

  SECTION("interior: h(phi_t(z)) = e^{G'(tau) t} h(z)") {
    for (auto G : {oracles::koebe_generator(), oracles::twoslit_generator()}) {
      auto K = koenigs(G);
      const Complex gp = K.g_prime_tau();
      for (int i = 0; i < 5; ++i) {
        const Complex z = rad(rng) * std::polar(1.0, ang(rng));
        for (double t : {0.5, 2.0}) {
          const Complex w = flow_point(G, z, t);
          CHECK(std::abs(K.h(w) - std::exp(gp * t) * K.h(z)) < 1e-7);
        }
      }
    }
  }

  SECTION("boundary: h(phi_t(z)) = h(z) + t") {
    auto G = oracles::halfplane_generator();
    auto K = koenigs(G);
    for (int i = 0; i < 5; ++i) {
      const Complex z = rad(rng) * std::polar(1.0, ang(rng));
      for (double t : {0.5, 2.0}) {
        const Complex w = flow_point(G, z, t);
        CHECK(std::abs(K.h(w) - K.h(z) - t) < 1e-7);
      }
    }
  }
}

TEST_CASE("beta points of the koenigs map") {
  SECTION("Koebe at -1: h(-1) = -1/4 and h'' -> 1/8") {
    auto K = koenigs(oracles::koebe_generator());
    auto rep = h_beta_point(K, BoundaryPoint(std::numbers::pi));
    REQUIRE(rep.is_beta_point);
    CHECK(std::abs(rep.h_at_x - Complex(-0.25, 0.0)) < 1e-7);
    // closed form: k''(z) = (4+2z)/(1-z)^4, so k''(-1) = 1/8
    CHECK(std::abs(rep.second_derivative - Complex(0.125, 0.0)) < 1e-5);
    CHECK(std::abs(rep.prediction - Complex(0.125, 0.0)) < 1e-5);
    CHECK(rep.prediction_mismatch < 1e-5);
  }

  SECTION("linear field: |h'| = 1, not a beta point") {
    auto K = koenigs(linear_generator());
    auto rep = h_beta_point(K, BoundaryPoint(1.0));
    CHECK_FALSE(rep.is_beta_point);
  }

  SECTION("half-plane at -1: A = 0, not a pole, |h'(-1)| = 1/4") {
    auto K = koenigs(oracles::halfplane_generator());
    auto rep = h_beta_point(K, BoundaryPoint(std::numbers::pi));
    CHECK_FALSE(rep.is_beta_point);
    CHECK(rep.generator_tag == BoundaryTag::Other);
    // |h'(-1)| = 1/|G(-1)| = 1/4 stays bounded, so |h'|/eps diverges
    CHECK(rep.mass_estimate.divergence_exponent == Approx(1.0).margin(0.05));
  }
}

TEST_CASE("beta numbers in the star-like case") {
  auto koebe = koenigs(oracles::koebe_generator());
  CHECK(beta_number(koebe, BoundaryPoint(std::numbers::pi)) ==
        Approx(1.0).margin(1e-4));

  auto twoslit = koenigs(oracles::twoslit_generator());
  CHECK(beta_number(twoslit, BoundaryPoint(0.0)) == Approx(1.0).margin(1e-4));
  CHECK(beta_number(twoslit, BoundaryPoint(std::numbers::pi)) ==
        Approx(1.0).margin(1e-4));

  // wrong regime rejected
  auto half = koenigs(oracles::halfplane_generator());
  CHECK_THROWS_AS(beta_number(half, BoundaryPoint(std::numbers::pi)),
                  argument_error);
  // non-pole rejected
  CHECK_THROWS_AS(beta_number(koebe, BoundaryPoint(1.0)), argument_error);
}

TEST_CASE("logarithmic asymptotics at null points") {
  SECTION("Koebe at 1: ell = 1/2, rho = 2, a1 = G'(0)/ell = -2") {
    auto K = koenigs(oracles::koebe_generator());
    auto asym = null_point_asymptotics(K, BoundaryPoint(0.0));
    CHECK(asym.ell_check == Approx(1.0).margin(1e-3));
    CHECK(asym.rho == Approx(2.0).margin(2e-3));
    CHECK(std::abs(asym.a_limit - Complex(-2.0, 0.0)) < 1e-5);
    CHECK(std::abs(asym.a_limit - asym.a_limit_expected) < 1e-5);
    CHECK(asym.h_divergence_exponent > 0.1);
  }

  SECTION("two-slit at i: ell = 1, rho = 1, a1 = -1") {
    auto K = koenigs(oracles::twoslit_generator());
    auto asym = null_point_asymptotics(K, BoundaryPoint(std::numbers::pi / 2.0));
    CHECK(asym.ell_check == Approx(1.0).margin(1e-3));
    CHECK(std::abs(asym.a_limit - Complex(-1.0, 0.0)) < 1e-5);
    CHECK(asym.h_divergence_exponent > 0.1);
  }

  SECTION("boundary regime null point: rho * ell = 1 and a2 = 1/ell") {
    auto G = boundary_null_generator();
    auto cls = classify_boundary(G, BoundaryPoint(0.0));
    REQUIRE(cls.tag == BoundaryTag::RegularNullPoint);
    // ell = |1 - tau|^2 for this construction
    const double ell_expected = std::norm(1.0 - std::polar(1.0, 2.0));
    CHECK(cls.dilation == Approx(ell_expected).epsilon(1e-8));

    auto K = koenigs(G);
    auto asym = null_point_asymptotics(K, BoundaryPoint(0.0));
    CHECK(asym.ell_check == Approx(1.0).margin(1e-3));
    CHECK(std::abs(asym.a_limit - Complex(1.0 / cls.dilation, 0.0)) < 1e-5);
  }

  SECTION("preconditions enforced") {
    auto K = koenigs(oracles::koebe_generator());
    CHECK_THROWS_AS(null_point_asymptotics(K, BoundaryPoint(std::numbers::pi)),
                    argument_error);
  }
}

TEST_CASE("boundary argument of the koenigs image") {
  SECTION("linear field: upsilon(t) = t") {
    auto K = koenigs(linear_generator());
    for (double t : {0.5, 2.0, 5.0}) {
      auto est = boundary_argument(K, t);
      REQUIRE(est.converged);
      CHECK(est.value.real() == Approx(wrap_angle(t)).margin(1e-8));
    }
  }

  SECTION("Koebe: the image boundary is one ray, constant argument pi") {
    auto K = koenigs(oracles::koebe_generator());
    for (double t : {0.5, 1.5, 3.0, 5.5}) {
      auto est = boundary_argument(K, t);
      REQUIRE(est.converged);
      CHECK(est.value.real() == Approx(std::numbers::pi).margin(1e-6));
    }
  }

  SECTION("two-slit: plateaus matching the measure cumulative up to a shift") {
    auto K = koenigs(oracles::twoslit_generator());
    // measure of 1/p: atoms of mass pi at +-i
    auto mu = HerglotzMeasure::atoms(
        {{std::numbers::pi / 2.0, std::numbers::pi},
         {3.0 * std::numbers::pi / 2.0, std::numbers::pi}});
    double shift = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < 32; ++i) {
      const double t = two_pi * (i + 0.37) / 32.0;
      auto est = boundary_argument(K, t);
      REQUIRE(est.converged);
      const double diff = mu.upsilon(t) - est.value.real();
      if (std::isnan(shift)) shift = diff;
      CHECK(diff == Approx(shift).margin(1e-4));
    }
  }

  SECTION("regime precondition") {
    auto K = koenigs(oracles::halfplane_generator());
    CHECK_THROWS_AS(boundary_argument(K, 1.0), argument_error);
  }
}
