#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "qcs/errors.hpp"
#include "qcs/poly_fourier.hpp"
#include "qcs/quadrature.hpp"

namespace qcs {

/** z'(x) = p2(x) z^2 + p1(x) z + p0(x). */
struct RiccatiProblem {
  PolyFourierSum p2 = PolyFourierSum::constant(1.0);
  PolyFourierSum p1;
  PolyFourierSum p0;
};

inline constexpr double kRiccatiResidualTol = 1e-10;

/** Max-abs coefficient of z' - (p2 z^2 + p1 z + p0): zero element iff z is an
 *  exact solution in the ring. */
inline double substitution_residual(const RiccatiProblem& prob,
                                    const PolyFourierSum& z) {
  const PolyFourierSum r =
      z.derivative() - (prob.p2 * z * z + prob.p1 * z + prob.p0);
  return r.max_abs_coeff();
}

/**
 * S = p1^2 - 2 p1' - 4 p0, the solvability polynomial of the normalized
 * (p2 = 1) problem. Requires polynomial p0, p1: the square-root floor below
 * is a statement about powers of x only.
 */
inline PolyFourierSum compute_S(const RiccatiProblem& prob) {
  if (coeff_distance(prob.p2, PolyFourierSum::constant(1.0)) > kRiccatiResidualTol)
    throw validation_error("solvability polynomial requires p2 = 1");
  if (!prob.p1.is_polynomial() || !prob.p0.is_polynomial())
    throw validation_error("solvability polynomial requires polynomial p0, p1");
  return prob.p1 * prob.p1 - 2.0 * prob.p1.derivative() - 4.0 * prob.p0;
}

/**
 * Polynomial part of sqrt(S) in decreasing powers: the unique T (up to sign,
 * fixed by the principal root of the leading coefficient) with
 * deg(S - T^2) < deg(S)/2. Odd-degree input admits no such T and signals
 * no_polynomial_solution.
 */
inline PolyFourierSum poly_sqrt_floor(const PolyFourierSum& S) {
  if (!S.is_polynomial())
    throw validation_error("square-root floor requires a polynomial");
  if (S.is_zero()) return PolyFourierSum::zero();
  const std::vector<Complex> s = S.poly_coeffs();
  const int m = static_cast<int>(s.size()) - 1;
  if (m % 2 != 0)
    throw no_polynomial_solution(
        "odd-degree solvability polynomial has no polynomial square root");
  const int k = m / 2;
  std::vector<Complex> t(static_cast<std::size_t>(k) + 1, Complex{});
  t[k] = std::sqrt(s[m]);  // principal branch
  for (int j = k - 1; j >= 0; --j) {
    // the x^{k+j} coefficient of T^2 is 2 t_k t_j plus a convolution over the
    // already-determined entries t_{j+1} .. t_k
    Complex acc{};
    for (int a = j + 1; a <= k; ++a) {
      const int b = k + j - a;
      if (b >= j + 1 && b <= k && b < a) acc += 2.0 * t[a] * t[b];
      if (b == a) acc += t[a] * t[a];
    }
    t[j] = (s[k + j] - acc) / (2.0 * t[k]);
  }
  return PolyFourierSum::from_poly_coeffs(t);
}

enum class RiccatiSolutionKind {
  polynomial_pair,
  constant_particular,
  quadrature_general,
  numeric
};

struct PolynomialCandidate {
  PolyFourierSum z;
  double residual = 0.0;  // coefficient-level substitution residual
  bool verified = false;
};

struct RiccatiSolution {
  RiccatiSolutionKind kind = RiccatiSolutionKind::numeric;
  std::vector<PolynomialCandidate> candidates;  // rejects kept, with residuals
  std::optional<PolyFourierSum> z_plus;          // verified -1/2 (p1 + T)
  std::optional<PolyFourierSum> z_minus;         // verified -1/2 (p1 - T)
};

/**
 * Candidates z = -1/2 (p1 +- T) with T the square-root floor of S. The floor
 * construction only makes the candidates necessary, not sufficient, so each
 * one is substituted back and kept only if the residual vanishes at the
 * coefficient level.
 */
inline RiccatiSolution solve_polynomial(const RiccatiProblem& prob) {
  const PolyFourierSum S = compute_S(prob);
  const PolyFourierSum T = poly_sqrt_floor(S);
  RiccatiSolution sol;
  const PolyFourierSum zp = (-0.5) * (prob.p1 + T);
  const PolyFourierSum zm = (-0.5) * (prob.p1 - T);
  for (int branch = 0; branch < 2; ++branch) {
    PolynomialCandidate c;
    c.z = branch == 0 ? zp : zm;
    c.residual = substitution_residual(prob, c.z);
    c.verified = c.residual < kRiccatiResidualTol;
    if (c.verified) {
      if (branch == 0)
        sol.z_plus = c.z;
      else
        sol.z_minus = c.z;
    }
    sol.candidates.push_back(std::move(c));
  }
  if (sol.z_plus || sol.z_minus) sol.kind = RiccatiSolutionKind::polynomial_pair;
  return sol;
}

namespace detail {

inline Complex coeff_of(const PolyFourierSum& p, int power, Complex freq) {
  for (const auto& t : p.terms())
    if (t.power == power && std::abs(t.freq - freq) <= kFreqTol) return t.coeff;
  return {};
}

}  // namespace detail

/**
 * All constants c with p2 c^2 + p1 c + p0 identically zero in the ring. Each
 * (power, freq) key yields a scalar quadratic whose roots are candidates; a
 * candidate survives only if it kills every key. If all three coefficients
 * vanish identically, every constant works; the degenerate family is reported
 * as empty rather than enumerated.
 */
inline std::vector<Complex> find_constant_solutions(const RiccatiProblem& prob) {
  struct Key {
    int power;
    Complex freq;
  };
  std::vector<Key> keys;
  auto add_keys = [&](const PolyFourierSum& p) {
    for (const auto& t : p.terms()) {
      const bool seen =
          std::any_of(keys.begin(), keys.end(), [&](const Key& k) {
            return k.power == t.power && std::abs(k.freq - t.freq) <= kFreqTol;
          });
      if (!seen) keys.push_back({t.power, t.freq});
    }
  };
  add_keys(prob.p2);
  add_keys(prob.p1);
  add_keys(prob.p0);

  std::vector<Complex> candidates;
  for (const auto& k : keys) {
    const Complex a = detail::coeff_of(prob.p2, k.power, k.freq);
    const Complex b = detail::coeff_of(prob.p1, k.power, k.freq);
    const Complex g = detail::coeff_of(prob.p0, k.power, k.freq);
    if (std::abs(a) > kRiccatiResidualTol) {
      const Complex disc = std::sqrt(b * b - 4.0 * a * g);
      candidates.push_back((-b + disc) / (2.0 * a));
      candidates.push_back((-b - disc) / (2.0 * a));
    } else if (std::abs(b) > kRiccatiResidualTol) {
      candidates.push_back(-g / b);
    }
  }

  std::vector<Complex> out;
  for (const Complex& c : candidates) {
    const PolyFourierSum quad =
        (c * c) * prob.p2 + c * prob.p1 + prob.p0;
    if (quad.max_abs_coeff() >= kRiccatiResidualTol) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Complex& o) {
      return std::abs(o - c) < 1e-9;
    });
    if (!dup) out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

/** Sampled general solution through z = c + 1/u. */
struct QuadratureTrajectory {
  std::vector<double> xs;
  std::vector<Complex> us;
  std::vector<Complex> zs;
  Complex c{};
  Complex u0{};
  Complex z0{};  // value at xs.front(), for oracle matching
};

/**
 * With a constant particular solution c, the substitution z = c + 1/u turns
 * the Riccati equation into the linear u' = -(2 p2 c + p1) u - p2, solved by
 * the integrating factor e^{A}, A = int(2 p2 c + p1): the exponent integral
 * is exact in the ring, the remaining quadrature of e^{A} p2 is composite
 * Simpson on each grid panel.
 */
inline QuadratureTrajectory solve_by_quadrature(const RiccatiProblem& prob,
                                                Complex c, double lo, double hi,
                                                int n_nodes = 801,
                                                Complex u0 = Complex(-1.0, 0.0)) {
  {
    const PolyFourierSum check = (c * c) * prob.p2 + c * prob.p1 + prob.p0;
    if (check.max_abs_coeff() >= kRiccatiResidualTol)
      throw validation_error(
          "quadrature reduction requires a constant particular solution");
  }
  if (n_nodes < 3) n_nodes = 3;
  const PolyFourierSum a_poly = 2.0 * c * prob.p2 + prob.p1;
  const PolyFourierSum a_anti = a_poly.antiderivative();
  const Complex a_lo = a_anti.evaluate(Complex(lo, 0.0));
  auto A = [&](double x) { return a_anti.evaluate(Complex(x, 0.0)) - a_lo; };
  auto integrand = [&](double x) {
    return std::exp(A(x)) * prob.p2.evaluate(Complex(x, 0.0));
  };

  QuadratureTrajectory traj;
  traj.c = c;
  traj.u0 = u0;
  traj.xs = uniform_grid(lo, hi, static_cast<std::size_t>(n_nodes));
  const std::vector<Complex> I = cumulative_simpson(integrand, traj.xs);
  traj.us.resize(traj.xs.size());
  traj.zs.resize(traj.xs.size());
  for (std::size_t i = 0; i < traj.xs.size(); ++i) {
    const Complex u = std::exp(-A(traj.xs[i])) * (u0 - I[i]);
    if (std::abs(u) < 1e-12)
      throw pole_error("quadrature solution crosses a pole", traj.xs[i]);
    traj.us[i] = u;
    traj.zs[i] = c + 1.0 / u;
  }
  traj.z0 = traj.zs.front();
  return traj;
}

/** A u0 guaranteeing no pole on [lo, hi]: past the largest real part of the
 *  accumulated integral, u0 - I(x) keeps real part >= 1. */
inline Complex pole_free_u0(const RiccatiProblem& prob, Complex c, double lo,
                            double hi, int n_nodes = 801) {
  const PolyFourierSum a_poly = 2.0 * c * prob.p2 + prob.p1;
  const PolyFourierSum a_anti = a_poly.antiderivative();
  const Complex a_lo = a_anti.evaluate(Complex(lo, 0.0));
  auto integrand = [&](double x) {
    return std::exp(a_anti.evaluate(Complex(x, 0.0)) - a_lo) *
           prob.p2.evaluate(Complex(x, 0.0));
  };
  const std::vector<double> xs = uniform_grid(lo, hi, static_cast<std::size_t>(n_nodes));
  const std::vector<Complex> I = cumulative_simpson(integrand, xs);
  double max_re = 0.0;
  for (const Complex& v : I) max_re = std::max(max_re, v.real());
  return Complex(max_re + 1.0, 0.0);
}

/** Independent oracle: classical one-step integration of the Riccati equation
 *  itself, used to cross-check every closed form. */
inline std::vector<std::pair<double, Complex>> integrate_numeric(
    const RiccatiProblem& prob, Complex z0, double lo, double hi,
    double step = 1e-4) {
  auto rhs = [&](double x, Complex z) {
    const Complex cx(x, 0.0);
    return prob.p2.evaluate(cx) * z * z + prob.p1.evaluate(cx) * z +
           prob.p0.evaluate(cx);
  };
  return rk4_path(rhs, z0, lo, hi, step);
}

}  // namespace qcs
