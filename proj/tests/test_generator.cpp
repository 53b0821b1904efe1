#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include "diskflow/generator.hpp"
#include "oracles.hpp"

using namespace diskflow;
using Catch::Approx;

TEST_CASE("from_measure assembles the expected generators") {
  SECTION("uniform mass 2pi at tau = 0 gives G(z) = -z") {
    auto G = Generator::from_measure(DiskPoint(0.0, 0.0),
                                     HerglotzMeasure::uniform(1.0));
    for (Complex z : {Complex(0.3, 0.1), Complex(-0.5, 0.4)})
      CHECK(std::abs(G(z) + z) < 1e-10);
  }

  SECTION("atom of mass 2pi at angle 0 gives the Koebe generator") {
    auto G = Generator::from_measure(DiskPoint(0.0, 0.0),
                                     HerglotzMeasure::atoms({{0.0, two_pi}}));
    for (Complex z : {Complex(0.2, 0.0), Complex(-0.3, 0.5), Complex(0.1, -0.6)})
      CHECK(std::abs(G(z) - oracles::koebe_G(z)) < 1e-10);
  }

  SECTION("boundary tau = 1 with uniform measure gives (1-z)^2") {
    auto G = Generator::from_measure(BoundaryPoint(0.0),
                                     HerglotzMeasure::uniform(1.0));
    for (Complex z : {Complex(0.0, 0.0), Complex(-0.4, 0.2)})
      CHECK(std::abs(G(z) - oracles::halfplane_G(z)) < 1e-10);
  }
}

TEST_CASE("evaluation and derivative") {
  auto koebe = oracles::koebe_generator();
  CHECK(std::abs(koebe(Complex(0.0, 0.0))) < 1e-15);
  CHECK(koebe.derivative(Complex(0.0, 0.0)).real() == Approx(-1.0));

  auto linear = Generator(DiskPoint(0.0, 0.0),
                          std::make_shared<ConstantP>(Complex(1.0, 0.0)), "-z");
  CHECK(linear.derivative(Complex(0.4, 0.2)).real() == Approx(-1.0));
  CHECK(std::abs(linear.derivative(Complex(0.4, 0.2)).imag()) < 1e-15);

  auto half = oracles::halfplane_generator();
  CHECK(half(Complex(0.0, 0.0)).real() == Approx(1.0));
  CHECK(half.derivative(Complex(0.0, 0.0)).real() == Approx(-2.0));

  SECTION("derivative matches finite differences at |z| <= 0.9") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> rad(0.0, 0.9), ang(0.0, two_pi);
    const double h = 1e-6;
    for (int i = 0; i < 20; ++i) {
      const double r = rad(rng), t = ang(rng);
      const Complex z(r * std::cos(t), r * std::sin(t));
      for (const Generator* G : {&koebe, &half}) {
        const Complex fd = ((*G)(z + h) - (*G)(z - h)) / (2.0 * h);
        const Complex d = G->derivative(z);
        CHECK(std::abs(d - fd) <= 1e-6 * (1.0 + std::abs(d)));
      }
    }
  }
}

TEST_CASE("dual generators") {
  SECTION("G(z) = -z is self-dual") {
    auto linear = Generator(DiskPoint(0.0, 0.0),
                            std::make_shared<ConstantP>(Complex(1.0, 0.0)));
    auto dual = linear.dual();
    for (Complex z : {Complex(0.5, 0.1), Complex(-0.2, -0.6)})
      CHECK(std::abs(dual(z) + z) < 1e-14);
  }

  SECTION("dual of the Koebe generator") {
    auto dual = oracles::koebe_generator().dual();
    for (Complex z : {Complex(0.3, 0.2), Complex(-0.1, 0.5)}) {
      const Complex expected = -z * (1.0 + z) / (1.0 - z);
      CHECK(std::abs(dual(z) - expected) < 1e-12);
    }
  }

  SECTION("product identity G * dual(G) = (tau-z)^2 (1-conj(tau) z)^2") {
    auto koebe = oracles::koebe_generator();
    auto dual = koebe.dual();
    const Complex z(0.5, 0.0);
    CHECK(std::abs(koebe(z) * dual(z) - Complex(0.25, 0.0)) < 1e-13);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rad(0.0, 0.95), ang(0.0, two_pi);
    std::vector<Generator> gens{koebe, oracles::twoslit_generator(),
                                oracles::halfplane_generator()};
    for (const auto& G : gens) {
      auto Ghat = G.dual();
      for (int i = 0; i < 40; ++i) {
        const double r = rad(rng), t = ang(rng);
        const Complex z2(r * std::cos(t), r * std::sin(t));
        const Complex b = (G.tau() - z2) * (1.0 - std::conj(G.tau()) * z2);
        CHECK(std::abs(G(z2) * Ghat(z2) - b * b) <=
              1e-10 * (1.0 + std::pow(std::abs(z2), 4)));
      }
    }
  }

  SECTION("dual of dual evaluates identically to the original") {
    auto koebe = oracles::koebe_generator();
    auto twice = koebe.dual().dual();
    for (Complex z : {Complex(0.7, 0.1), Complex(-0.3, -0.4)})
      CHECK(std::abs(koebe(z) - twice(z)) == 0.0);
  }
}

TEST_CASE("boundary classification of the Koebe generator") {
  auto koebe = oracles::koebe_generator();

  auto pole = classify_boundary(koebe, BoundaryPoint(std::numbers::pi));
  CHECK(pole.tag == BoundaryTag::RegularPole);
  CHECK(pole.mass == Approx(2.0).epsilon(1e-8));
  CHECK(pole.a.real() == Approx(-2.0).epsilon(1e-8));

  auto null = classify_boundary(koebe, BoundaryPoint(0.0));
  CHECK(null.tag == BoundaryTag::RegularNullPoint);
  // the atom at angle pi is placed to one ulp, which bounds the dilation
  // accuracy near 1e-9
  CHECK(null.dilation == Approx(0.5).margin(5e-8));
  CHECK(std::abs(null.dilation_imag) <= 1e-6 * 1.5);

  auto other = classify_boundary(koebe, BoundaryPoint(std::numbers::pi / 2.0));
  CHECK(other.tag == BoundaryTag::Other);
  // G(i) = -1
  CHECK(std::abs(other.value_estimate.value - Complex(-1.0, 0.0)) < 1e-8);
}

TEST_CASE("denjoy-wolff point reports Other with a note") {
  auto half = oracles::halfplane_generator();
  auto res = classify_boundary(half, BoundaryPoint(0.0));
  CHECK(res.tag == BoundaryTag::Other);
  CHECK(res.note == "denjoy_wolff");

  auto minus = classify_boundary(half, BoundaryPoint(std::numbers::pi));
  CHECK(minus.tag == BoundaryTag::Other);
  CHECK(minus.note.empty());
}

TEST_CASE("classification is invariant under rotation conjugation") {
  auto base = oracles::twoslit_generator();
  std::vector<double> rotations{0.7, 2.31, 4.0};
  std::vector<double> probes{0.0, std::numbers::pi / 2.0, 1.1};
  for (double alpha : rotations) {
    // e^{-i alpha} G(e^{i alpha} z): atoms rotate by -alpha.
    auto rotated = Generator(
        DiskPoint(0.0, 0.0),
        std::make_shared<AtomSumP>(std::vector<HerglotzMeasure::Atom>{
            {wrap_angle(0.0 - alpha), 0.5},
            {wrap_angle(std::numbers::pi - alpha), 0.5}}),
        "rotated");
    for (double t : probes) {
      auto a = classify_boundary(base, BoundaryPoint(t));
      auto b = classify_boundary(rotated, BoundaryPoint(t - alpha));
      CHECK(a.tag == b.tag);
      if (a.tag == BoundaryTag::RegularPole)
        CHECK(std::abs(a.mass - b.mass) < 1e-10 * (1.0 + a.mass));
      if (a.tag == BoundaryTag::RegularNullPoint)
        CHECK(std::abs(a.dilation - b.dilation) < 5e-8 * (1.0 + a.dilation));
    }
  }
}

TEST_CASE("cowen-pommerenke limit") {
  // Koebe at x = -1: p((1-eps)x)*eps/2 = (2-eps)/2 -> 1, and the mass
  // relation 2 |x - tau|^2 L = 2 recovers the pole mass.
  auto koebe = oracles::koebe_generator();
  const double L = cowen_pommerenke_L(koebe, BoundaryPoint(std::numbers::pi));
  CHECK(L == Approx(1.0).epsilon(1e-8));
  CHECK(2.0 * std::norm(Complex(-1.0, 0.0)) * L == Approx(2.0).epsilon(1e-8));

  auto linear = Generator(DiskPoint(0.0, 0.0),
                          std::make_shared<ConstantP>(Complex(1.0, 0.0)));
  CHECK(std::abs(cowen_pommerenke_L(linear, BoundaryPoint(1.0))) < 1e-10);

  auto half = oracles::halfplane_generator();
  CHECK(std::abs(cowen_pommerenke_L(half, BoundaryPoint(std::numbers::pi))) < 1e-10);
}

TEST_CASE("pole budget inequality") {
  auto koebe = oracles::koebe_generator();
  std::vector<std::pair<BoundaryPoint, double>> poles{
      {BoundaryPoint(std::numbers::pi), 2.0}};
  auto budget = pole_budget_check(koebe, poles);
  CHECK(budget.lhs == Approx(1.0));
  CHECK(budget.rhs == Approx(1.0));
  CHECK(budget.holds);

  auto twoslit = oracles::twoslit_generator();
  std::vector<std::pair<BoundaryPoint, double>> tpoles{
      {BoundaryPoint(0.0), 1.0}, {BoundaryPoint(std::numbers::pi), 1.0}};
  auto tbudget = pole_budget_check(twoslit, tpoles);
  CHECK(tbudget.lhs == Approx(1.0));
  CHECK(tbudget.rhs == Approx(1.0));
  CHECK(tbudget.holds);

  auto linear = Generator(DiskPoint(0.0, 0.0),
                          std::make_shared<ConstantP>(Complex(1.0, 0.0)));
  auto none = pole_budget_check(linear, {});
  CHECK(none.lhs == 0.0);
  CHECK(none.holds);
}

TEST_CASE("duality swaps null points and poles with the quartic mass law") {
  auto koebe = oracles::koebe_generator();
  auto dual = koebe.dual();

  // null point of G at 1 with dilation 1/2 <-> pole of dual at 1 with mass
  // |tau - x|^4 / dilation = 2.
  auto null = classify_boundary(koebe, BoundaryPoint(0.0));
  REQUIRE(null.tag == BoundaryTag::RegularNullPoint);
  auto dual_pole = classify_boundary(dual, BoundaryPoint(0.0));
  REQUIRE(dual_pole.tag == BoundaryTag::RegularPole);
  CHECK(dual_pole.mass == Approx(1.0 / null.dilation).epsilon(1e-7));

  // and the pole of G at -1 corresponds to a null point of the dual.
  auto dual_null = classify_boundary(dual, BoundaryPoint(std::numbers::pi));
  REQUIRE(dual_null.tag == BoundaryTag::RegularNullPoint);
  auto pole = classify_boundary(koebe, BoundaryPoint(std::numbers::pi));
  CHECK(pole.mass == Approx(1.0 / dual_null.dilation).epsilon(1e-7));
}

TEST_CASE("atom-built generators expose exactly their atoms as poles") {
  auto seeded = oracles::seeded_generators(4, 1234u);
  for (const auto& sg : seeded) {
    int found = 0;
    for (int k = 0; k < 720; ++k) {
      const double theta = two_pi * k / 720.0;
      if (sg.G.tau_on_boundary() &&
          std::abs(angle_difference(theta, sg.G.tau_angle())) < 1e-12)
        continue;
      auto res = classify_boundary(sg.G, BoundaryPoint(theta));
      if (res.tag == BoundaryTag::RegularPole) ++found;
    }
    CHECK(found == static_cast<int>(sg.atoms.size()));
  }
}

TEST_CASE("measure-backed classification agrees with the measure criterion") {
  std::vector<HerglotzMeasure> measures;
  measures.push_back(HerglotzMeasure::step({{std::numbers::pi, two_pi, 2.0}}));
  measures.push_back(HerglotzMeasure::power_cusp(CuspProfile::standard(2.5)));
  measures.push_back(HerglotzMeasure::power_cusp(CuspProfile::standard(1.5)));
  measures.push_back(HerglotzMeasure::uniform(1.0));

  for (const auto& mu : measures) {
    auto G = Generator::from_measure(DiskPoint(0.0, 0.0), mu);
    for (int k = 0; k < 16; ++k) {
      const double theta = two_pi * k / 16.0;
      const bool crit = pole_criterion(mu, BoundaryPoint(theta)).is_pole;
      const bool cls = classify_boundary(G, BoundaryPoint(theta)).tag ==
                       BoundaryTag::RegularPole;
      INFO("angle " << theta);
      CHECK(crit == cls);
    }
  }
}

TEST_CASE("generator construction guards") {
  CHECK_THROWS_AS(Generator(DiskPoint(0.0, 0.0),
                            std::make_shared<ConstantP>(Complex(-1.0, 0.0))),
                  argument_error);
  CHECK_THROWS_AS(Generator(DiskPoint(0.0, 0.0), nullptr), argument_error);
}
