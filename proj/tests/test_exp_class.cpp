#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "qcs/exp_class.hpp"

using qcs::Complex;
using qcs::ExpClassFunction;
using qcs::ExpClassSum;
using qcs::PhaseMode;
using qcs::PolyFourierSum;
using Catch::Matchers::WithinAbs;

namespace {
const Complex I{0.0, 1.0};
}

TEST_CASE("unit element evaluates to one", "[exp_class]") {
  auto f = ExpClassFunction::one();
  CHECK_THAT(std::abs(f.evaluate(Complex(1.3, -0.4)) - 1.0), WithinAbs(0.0, 1e-15));
}

TEST_CASE("evaluation of x e^{ix} exp(x^2/2) at 1", "[exp_class]") {
  // reference value computed with 30-digit arithmetic
  ExpClassFunction f(PolyFourierSum{{1.0, 1, I}}, Complex(0.5, 0.0), {}, {});
  const Complex expect(0.890807904293128619556226860959, 1.38735111132976335569713883794);
  CHECK_THAT(std::abs(f.evaluate(1.0) - expect), WithinAbs(0.0, 1e-14));
}

TEST_CASE("gaussian atom", "[exp_class]") {
  auto g = ExpClassFunction::from_exponent(Complex(-0.5, 0.0), {}, {});
  CHECK_THAT(std::abs(g.evaluate(0.0) - 1.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(g.evaluate(1.0) - std::exp(-0.5)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("phase modes evaluate as nested exponentials", "[exp_class]") {
  // exp(d e^{i nu x}) against direct arithmetic
  const Complex d(0.3, -0.2);
  const double nu = 1.7;
  auto f = ExpClassFunction::from_exponent({}, {}, {}, {{Complex(0.0, nu), d}});
  const Complex z(0.9, 0.2);
  const Complex expect = std::exp(d * std::exp(I * nu * z));
  CHECK_THAT(std::abs(f.evaluate(z) - expect), WithinAbs(0.0, 1e-14));
}

TEST_CASE("multiplication is pointwise", "[exp_class]") {
  qcs::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = qcs::random_exp_class(rng);
    auto g = qcs::random_exp_class(rng);
    const Complex z = rng.complex_in_box(1.4);
    CHECK_THAT(std::abs((f * g).evaluate(z) - f.evaluate(z) * g.evaluate(z)),
               WithinAbs(0.0, 1e-11));
  }
}

TEST_CASE("derivative matches finite differences", "[exp_class]") {
  qcs::Rng rng(47);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    auto f = qcs::random_exp_class(rng);
    auto df = f.derivative();
    const Complex z = rng.complex_in_box(1.2);
    const Complex fd = (f.evaluate(z + h) - f.evaluate(z - h)) / (2.0 * h);
    CHECK(std::abs(df.evaluate(z) - fd) / (1.0 + std::abs(fd)) < 1e-6);
  }
}

TEST_CASE("derivative of exp(x^2/2) is x exp(x^2/2)", "[exp_class]") {
  auto f = ExpClassFunction::from_exponent(Complex(0.5, 0.0), {}, {});
  auto df = f.derivative();
  ExpClassFunction expect(PolyFourierSum::monomial(1.0, 1), Complex(0.5, 0.0), {}, {});
  CHECK(qcs::sample_distance(df, expect) < 1e-12);
}

TEST_CASE("leibniz rule holds", "[exp_class]") {
  qcs::Rng rng(53);
  auto f = qcs::random_exp_class(rng);
  auto g = qcs::random_exp_class(rng);
  auto lhs = ExpClassSum(f * g).derivative();
  auto rhs = ExpClassSum(f.derivative() * g) + ExpClassSum(f * g.derivative());
  CHECK(qcs::sample_distance(lhs, rhs) < 1e-10);
}

TEST_CASE("shift evaluates at the shifted argument", "[exp_class]") {
  qcs::Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = qcs::random_exp_class(rng);
    const Complex h = rng.complex_in_box(0.6);
    auto g = f.shifted(h);
    const Complex z = rng.complex_in_box(1.2);
    CHECK_THAT(std::abs(g.evaluate(z) - f.evaluate(z + h)), WithinAbs(0.0, 1e-11));
  }
}

TEST_CASE("shift of a pure gaussian produces the closed form", "[exp_class]") {
  // exp(a (x+h)^2) = e^{a h^2} e^{2 a h x} exp(a x^2)
  const Complex a(-0.4, 0.15), h(0.5, -0.2);
  auto f = ExpClassFunction::from_exponent(a, {}, {});
  auto g = f.shifted(h);
  CHECK_THAT(std::abs(g.quad() - a), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(g.lin() - 2.0 * a * h), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(g.cst() - a * h * h), WithinAbs(0.0, 1e-15));
}

TEST_CASE("shift homomorphism", "[exp_class]") {
  qcs::Rng rng(67);
  auto f = qcs::random_exp_class(rng);
  const Complex h1(0.3, 0.1), h2(-0.45, 0.2);
  CHECK(qcs::sample_distance(f.shifted(h1).shifted(h2), f.shifted(h1 + h2)) < 1e-11);
}

TEST_CASE("mul_exp adds exponent data", "[exp_class]") {
  const double s = 0.1;
  auto f = ExpClassFunction::one().mul_exp({}, Complex(0.0, -2.0 * s), {});
  // f is exp(-0.2 i x)
  const Complex z(1.1, 0.0);
  CHECK_THAT(std::abs(f.evaluate(z) - std::exp(Complex(0.0, -0.2) * z)),
             WithinAbs(0.0, 1e-15));

  qcs::Rng rng(71);
  auto g = qcs::random_exp_class(rng);
  const Complex dq(0.05, -0.1), dl(0.3, 0.2), dc(-0.1, 0.4);
  auto h = g.mul_exp(dq, dl, dc, {{Complex(0.0, 1.3), Complex(0.2, 0.1)}});
  const Complex z2(0.4, -0.3);
  const Complex factor =
      std::exp((dq * z2 + dl) * z2 + dc +
               Complex(0.2, 0.1) * std::exp(Complex(0.0, 1.3) * z2));
  CHECK_THAT(std::abs(h.evaluate(z2) - g.evaluate(z2) * factor), WithinAbs(0.0, 1e-12));
}

TEST_CASE("equality by evaluation is split-invariant", "[exp_class]") {
  qcs::Rng rng(83);
  auto f = qcs::random_exp_class(rng);
  // move the constant into the prefactor: same function, different layout
  ExpClassFunction g(std::exp(f.cst()) * f.prefactor(), f.quad(), f.lin(), {},
                     f.modes());
  // scale prefactor by e and subtract 1 from the constant: a third layout
  ExpClassFunction h(std::exp(Complex(1.0, 0.0)) * g.prefactor(), g.quad(), g.lin(),
                     Complex(-1.0, 0.0), g.modes());
  CHECK(qcs::approx_equal(f, g, 1e-12));
  CHECK(qcs::approx_equal(g, h, 1e-12));
  CHECK(qcs::approx_equal(f, h, 1e-12));  // transitive across layouts
}

TEST_CASE("sum type evaluates additively and merges equal exponents", "[exp_class]") {
  qcs::Rng rng(97);
  auto f = qcs::random_exp_class(rng);
  auto g = qcs::random_exp_class(rng);
  auto s = ExpClassSum(f) + ExpClassSum(g);
  const Complex z = rng.complex_in_box(1.0);
  CHECK_THAT(std::abs(s.evaluate(z) - (f.evaluate(z) + g.evaluate(z))),
             WithinAbs(0.0, 1e-12));

  // adding an atom to itself merges rather than growing the sum
  auto twice = ExpClassSum(f) + ExpClassSum(f);
  CHECK(twice.size() == 1);
  CHECK_THAT(std::abs(twice.evaluate(z) - 2.0 * f.evaluate(z)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("sum arithmetic respects linear structure", "[exp_class]") {
  qcs::Rng rng(101);
  auto f = qcs::random_exp_class(rng);
  auto g = qcs::random_exp_class(rng);
  auto lhs = (ExpClassSum(f) - ExpClassSum(g)).derivative();
  auto rhs = ExpClassSum(f.derivative()) - ExpClassSum(g.derivative());
  CHECK(qcs::sample_distance(lhs, rhs) < 1e-10);
}

TEST_CASE("closure under randomized operation chains", "[exp_class]") {
  qcs::Rng rng(113);
  for (int trial = 0; trial < 10; ++trial) {
    ExpClassSum f = qcs::random_exp_class(rng);
    for (int step = 0; step < 6; ++step) {
      switch (rng.uniform_int(0, 3)) {
        case 0: f = f.derivative(); break;
        case 1: f = f.shifted(rng.complex_in_box(0.3)); break;
        case 2: f = f.mul_exp({}, rng.complex_in_box(0.4), {}); break;
        default: f = f + ExpClassSum(qcs::random_exp_class(rng)); break;
      }
    }
    // still a finite, evaluable object at every sample point
    for (const Complex& z : qcs::equality_samples()) {
      const Complex v = f.evaluate(z);
      CHECK(std::isfinite(v.real()));
      CHECK(std::isfinite(v.imag()));
    }
  }
}

TEST_CASE("evaluation overflow trips the magnitude guard", "[exp_class]") {
  auto f = ExpClassFunction::from_exponent(Complex(1.0, 0.0), {}, {});  // exp(x^2)
  CHECK_THROWS_AS(f.evaluate(Complex(50.0, 0.0)), qcs::numeric_error);
}
