#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "qcs/quadrature.hpp"
#include "qcs/rng.hpp"
#include "qcs/theta_weight.hpp"

using qcs::Complex;
using qcs::CSConstruction;
using qcs::CSParameters;
using qcs::PeriodicDeformation;
using qcs::WeightFunction;

namespace {

const Complex I{0.0, 1.0};

CSConstruction worked_cs(double s = 0.5) {
  const CSParameters p = CSParameters::make(s, Complex(-2.0, 0.0), 1.0);
  PeriodicDeformation d;
  d.s = s;
  return qcs::build_states(p, d);
}

CSConstruction deformed_cs() {
  const CSParameters p = CSParameters::make(1.0, Complex(-2.0, 0.0), 1.0);
  PeriodicDeformation d;
  d.s = 1.0;
  d.coeffs[1] = Complex(0.1, 0.0);
  return qcs::build_states(p, d, 1.0);
}

WeightFunction plain_weight(double s, double gamma_re, bool reparam) {
  WeightFunction w;
  w.params = CSParameters::make(s, Complex(-2.0, 0.0), 1.0);
  w.gamma_re = gamma_re;
  w.reparam = reparam;
  return w;
}

}  // namespace

TEST_CASE("theta3 matches hand-summed references", "[theta_weight]") {
  // at tau = i pi only n = 0, 1, 2 contribute above 1e-39
  const double expect =
      1.0 + 2.0 * std::exp(-M_PI * M_PI) + 2.0 * std::exp(-4.0 * M_PI * M_PI);
  const Complex v = qcs::theta3(Complex(0.0, 0.0), Complex(0.0, M_PI));
  CHECK(std::abs(v - Complex(expect, 0.0)) < 1e-15);
  CHECK(std::abs(v.real() - 1.000103446372407639) < 1e-15);
  CHECK(std::abs(v.imag()) < 1e-18);

  // as Im tau grows only the n = 0 term survives
  CHECK(std::abs(qcs::theta3(Complex(0.0, 0.0), Complex(0.0, 1000.0)) - 1.0) <
        1e-100);

  // generic complex point against a brute-force symmetric partial sum
  const Complex z(0.3, 0.2);
  const Complex tau(0.3, 0.7);
  Complex brute{};
  for (int n = -25; n <= 25; ++n)
    brute += std::exp(Complex(0.0, M_PI) * tau * static_cast<double>(n * n) +
                      Complex(0.0, 2.0 * n) * z);
  CHECK(std::abs(qcs::theta3(z, tau) - brute) < 1e-14 * std::abs(brute));
}

TEST_CASE("theta3 satisfies the quasi-periodicity identities", "[theta_weight]") {
  qcs::Rng rng(4201);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex z(rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0));
    const Complex tau(rng.uniform(-1.0, 1.0), rng.uniform(0.5, 50.0));
    const Complex base = qcs::theta3(z, tau);

    const Complex shifted_pi = qcs::theta3(z + M_PI, tau);
    CHECK(std::abs(shifted_pi - base) < 1e-12 * std::abs(base));

    const Complex shifted_tau = qcs::theta3(z + M_PI * tau, tau);
    const Complex jump = std::exp(-I * M_PI * tau - 2.0 * I * z) * base;
    CHECK(std::abs(shifted_tau - jump) < 1e-12 * std::abs(jump));
  }
}

TEST_CASE("theta3 rejects tau off the upper half-plane", "[theta_weight]") {
  CHECK_THROWS_AS(qcs::theta3(Complex(0.0, 0.0), Complex(1.0, 0.0)),
                  qcs::validation_error);
  CHECK_THROWS_AS(qcs::theta3(Complex(0.2, 0.1), Complex(0.0, -1.0)),
                  qcs::validation_error);
}

TEST_CASE("lattice weight reproduces frozen values and symmetries",
          "[theta_weight]") {
  const WeightFunction w = plain_weight(3.0, 0.0, true);
  // sum over n of exp(-9 n^2) = 1 + 2 e^-9 + 2 e^-36 + ...
  CHECK(std::abs(qcs::sigma_lattice(w, 0.0) - 1.000246819608173823) < 1e-15);

  // gamma_re = 0 makes the weight even in t
  for (double t : {0.7, 2.1}) {
    const double rel = std::abs(qcs::sigma_lattice(w, t) -
                                qcs::sigma_lattice(w, -t)) /
                       qcs::sigma_lattice(w, t);
    CHECK(rel < 1e-14);
  }

  // every lattice term is positive, so the weight sits above its n = 0 term
  for (bool reparam : {true, false}) {
    const WeightFunction wp = plain_weight(0.5, 0.3, reparam);
    for (int k = 0; k <= 10; ++k) {
      const double t = -M_PI + M_PI * k / 5.0;
      CHECK(qcs::sigma_lattice(wp, t) > 1.0);
    }
  }

  // the two conventions differ exactly by s -> s / sqrt2
  const WeightFunction off = plain_weight(1.3, 0.2, false);
  const WeightFunction on = plain_weight(1.3 / std::sqrt(2.0), 0.2, true);
  for (double t : {0.0, 1.1}) {
    const double a = qcs::sigma_lattice(off, t);
    const double b = qcs::sigma_lattice(on, t);
    CHECK(std::abs(a - b) < 1e-14 * a);
  }

  // the state-consistent weight is the reparam-off lattice regardless of flag
  const WeightFunction flagged = plain_weight(1.3, 0.2, true);
  for (double t : {0.4, -2.0})
    CHECK(std::abs(qcs::sigma_state(flagged, t) - qcs::sigma_lattice(off, t)) <
          1e-15 * qcs::sigma_lattice(off, t));
}

TEST_CASE("closed theta form agrees with the lattice sum", "[theta_weight]") {
  for (double s : {0.5, 1.0, 2.0}) {
    for (double gamma_re : {0.0, 0.3}) {
      for (bool reparam : {true, false}) {
        const WeightFunction w = plain_weight(s, gamma_re, reparam);
        for (int k = 0; k <= 12; ++k) {
          const double t = -M_PI + M_PI * k / 6.0;
          const double lattice = qcs::sigma_lattice(w, t);
          const double closed = qcs::sigma_closed(w, t);
          CHECK(std::abs(closed - lattice) < 1e-12 * lattice);
        }
      }
    }
  }
}

TEST_CASE("closed form growth is carried by the Gaussian prefactor",
          "[theta_weight]") {
  const WeightFunction w = plain_weight(3.0, 0.0, true);
  const double t = 2.0;
  const double b = 9.0;
  const double c = b / (2.0 * M_PI) * t;
  const double prefactor = std::sqrt(M_PI) / 3.0 * std::exp(c * c / b);
  const double ratio = qcs::sigma_closed(w, t) / prefactor;
  CHECK(ratio > 0.3);
  CHECK(ratio < 3.0);
}

TEST_CASE("t-representation maps the state onto the circle", "[theta_weight]") {
  const CSConstruction cs = worked_cs(0.5);
  const qcs::ExpClassFunction state = qcs::t_representation(cs);

  // exponent -(s^2/16 pi^2) t^2 + (i/8 pi) t for s = 1/2, delta = -2, omega = 1
  CHECK(std::abs(state.quad() - Complex(-0.25 / (16.0 * M_PI * M_PI), 0.0)) <
        1e-15);
  CHECK(std::abs(state.lin() - I / (8.0 * M_PI)) < 1e-15);
  CHECK(std::abs(state.cst()) < 1e-15);
  CHECK(state.modes().empty());
  CHECK(std::abs(state.evaluate(Complex(0.0, 0.0)) - 1.0) < 1e-15);

  // the substitution is literal: state_t(t) = state_minus((is/2pi) t)
  const Complex a = I * 0.5 / (2.0 * M_PI);
  for (double t : {1.7, -2.4}) {
    const Complex direct = cs.state_minus.evaluate(a * t);
    const Complex mapped = state.evaluate(Complex(t, 0.0));
    CHECK(std::abs(mapped - direct) < 1e-14 * std::abs(direct));
  }

  // a periodic deformation becomes an integer-frequency mode e^{i t}
  const CSConstruction dcs = deformed_cs();
  const qcs::ExpClassFunction dstate = qcs::t_representation(dcs);
  REQUIRE(dstate.modes().size() == 1);
  CHECK(std::abs(dstate.modes()[0].freq - I) < 1e-12);
  CHECK(std::abs(dstate.modes()[0].amp - Complex(0.05 / (2.0 * M_PI), 0.0)) <
        1e-12);
}

TEST_CASE("periodicity factor relates shifted circle states", "[theta_weight]") {
  const CSConstruction cs = worked_cs(0.5);

  CHECK(std::abs(qcs::periodicity_factor(cs, 0, 0.4) - 1.0) < 1e-15);

  // |factor(1, 0)| = exp(-gamma_re - s^2/4); gamma_re = 0 at delta = -2
  CHECK(std::abs(std::abs(qcs::periodicity_factor(cs, 1, 0.0)) -
                 std::exp(-1.0 / 16.0)) < 1e-15);

  // one-step cocycle: factor(2, t) = factor(1, t) factor(1, t + 2 pi)
  const double t = -0.9;
  const Complex two = qcs::periodicity_factor(cs, 2, t);
  const Complex chain = qcs::periodicity_factor(cs, 1, t) *
                        qcs::periodicity_factor(cs, 1, t + 2.0 * M_PI);
  CHECK(std::abs(two - chain) < 1e-12 * std::abs(two));

  CHECK(qcs::periodicity_deviation(cs, 1) < 1e-10);
  CHECK(qcs::periodicity_deviation(cs, -2) < 1e-9);

  // remains exact when the deformation contributes periodic modes
  CHECK(qcs::periodicity_deviation(deformed_cs(), 1) < 1e-10);
}

TEST_CASE("weighted norm integral is quadratic and vanishes with the weight",
          "[theta_weight]") {
  const CSConstruction cs = worked_cs(0.5);
  const qcs::ExpClassFunction state = qcs::t_representation(cs);
  const WeightFunction w = qcs::make_weight(cs);

  const Complex zero = qcs::weighted_norm_integral(
      state, [](double) { return 0.0; }, 101);
  CHECK(std::abs(zero) == 0.0);

  const auto weight = [&](double t) { return qcs::sigma_state(w, t); };
  const Complex base = qcs::weighted_norm_integral(state, weight, 501);
  const qcs::ExpClassFunction doubled =
      state.mul_prefactor(qcs::PolyFourierSum::constant(Complex(0.0, 2.0)));
  const Complex scaled = qcs::weighted_norm_integral(doubled, weight, 501);
  CHECK(std::abs(scaled - 4.0 * base) < 1e-13 * std::abs(base));
}

TEST_CASE("unity integral is a positive real scalar", "[theta_weight]") {
  const CSConstruction cs = worked_cs(0.5);
  const WeightFunction w = qcs::make_weight(cs);

  const Complex u = qcs::unity_integral(cs, w);
  REQUIRE(u.real() > 0.0);
  CHECK(std::abs(u.imag()) < 1e-12 * u.real());

  // independent quadrature: Gauss-Legendre with 5000 nodes
  const qcs::ExpClassFunction state = qcs::t_representation(cs);
  const Complex oracle = qcs::gauss_legendre(
      [&](double t) {
        const Complex v = state.evaluate(Complex(t, 0.0));
        return std::conj(v) * v * qcs::sigma_state(w, t);
      },
      -M_PI, M_PI, 5000);
  CHECK(std::abs(u - oracle) < 1e-8 * std::abs(oracle));

  const double norm = qcs::normalization(cs, w);
  CHECK(std::abs(norm - 1.0 / std::sqrt(u.real())) < 1e-14 * norm);

  // scaling by the normalization drives the unity scalar to one
  const qcs::ExpClassFunction normalized =
      state.mul_prefactor(qcs::PolyFourierSum::constant(Complex(norm, 0.0)));
  const Complex unit = qcs::weighted_norm_integral(
      normalized, [&](double t) { return qcs::sigma_state(w, t); }, 2001);
  CHECK(std::abs(unit.real() - 1.0) < 1e-8);

  // the convention flag only affects the sigma audits, not the unity scalar
  const double u_off = qcs::unity_scalar(cs, qcs::make_weight(cs, false));
  CHECK(std::abs(u_off - u.real()) < 1e-15 * u.real());
}

TEST_CASE("interval folding reproduces the direct integral", "[theta_weight]") {
  const CSConstruction cs = worked_cs(0.5);
  const WeightFunction w = qcs::make_weight(cs);

  const qcs::FoldReport rep = qcs::fold_consistency(cs, w, 8);
  CHECK(rep.tail_decaying);
  CHECK(rep.folded <= rep.direct + 1e-12);
  CHECK(rep.tail > 1e-8 * rep.direct);  // truncation really discards mass
  CHECK(rep.agreement <= rep.tail * 1.5 + 1e-10 * rep.direct);

  // fewer bands discard more mass but stay within their own tail estimate
  const qcs::FoldReport coarse = qcs::fold_consistency(cs, w, 2);
  CHECK(coarse.tail > rep.tail);
  CHECK(coarse.agreement > rep.agreement);
  CHECK(coarse.agreement <= coarse.tail * 1.5 + 1e-10 * coarse.direct);

  CHECK_THROWS_AS(qcs::fold_consistency(cs, w, 0), qcs::validation_error);
}

TEST_CASE("weight guards reject runaway arguments", "[theta_weight]") {
  const WeightFunction w = plain_weight(0.5, 0.0, true);
  CHECK_THROWS_AS(qcs::sigma_lattice(w, 1e6), qcs::numeric_error);
  CHECK_THROWS_AS(qcs::sigma_closed(w, 1e6), qcs::numeric_error);
}
