#pragma once

#include <cmath>
#include <limits>

#include "qcs/deformation.hpp"
#include "qcs/errors.hpp"
#include "qcs/exp_class.hpp"
#include "qcs/log.hpp"

namespace qcs {

inline constexpr double kSingularDeltaTol = 1e-9;

/**
 * Parameter tuple of the deformed oscillator. q = e^{-s^2} and the product of
 * the ladder normalizations alpha * conj(alpha) = 1/(1-q^2) are derived, not
 * stored independently. delta = 1 and delta = -3 are rejected outright (the
 * eigenvalue formula divides by (delta-1)(delta+3)); delta = -1 and delta = 3
 * merely collapse the quadratic coefficient of the solvability polynomial and
 * are flagged instead.
 */
struct CSParameters {
  double s = 0.1;
  double q = 0.0;
  double alpha_sq = 0.0;
  Complex delta{};
  double omega = 0.0;
  bool degenerate_leading = false;

  static CSParameters make(double s, Complex delta, double omega) {
    if (!(s > 0.0) || !std::isfinite(s))
      throw validation_error("deformation scale s must be positive and finite");
    if (std::abs(delta - 1.0) < kSingularDeltaTol ||
        std::abs(delta + 3.0) < kSingularDeltaTol)
      throw validation_error(
          "delta = 1 and delta = -3 make the eigenvalue denominator vanish");
    CSParameters p;
    p.s = s;
    p.q = std::exp(-s * s);
    // 1 - q^2 = -expm1(-2 s^2) avoids cancellation for small s
    p.alpha_sq = 1.0 / (-std::expm1(-2.0 * s * s));
    p.delta = delta;
    p.omega = omega;
    p.degenerate_leading = std::abs(delta + 1.0) < kSingularDeltaTol ||
                           std::abs(delta - 3.0) < kSingularDeltaTol;
    if (p.degenerate_leading)
      log::info("delta collapses the quadratic solvability coefficient");
    return p;
  }
};

enum class LadderKind { annihilation, creation, weak_annihilation, eigen_L };

/**
 * Immutable operator descriptor. For a nontrivial periodic part b the factors
 * e^{i s b(x)} leave the prefactor ring; by default they are expanded as a
 * truncated exponential series of order exp_series_order (remainder bound
 * reported, optionally enforced via trunc_tol), while exact_phase_modes = true
 * carries them exactly in the outer exponent instead.
 */
struct LadderOperator {
  LadderKind kind = LadderKind::annihilation;
  CSParameters params;
  PeriodicDeformation beta;  // defaults to the trivial deformation beta(x) = x
  double alpha_phase = 0.0;
  int exp_series_order = 6;
  bool exact_phase_modes = false;
  double window = 3.0;
  double trunc_tol = std::numeric_limits<double>::infinity();

  Complex alpha() const {
    return std::sqrt(params.alpha_sq) *
           std::exp(Complex(0.0, alpha_phase));
  }
  Complex alpha_bar() const { return std::conj(alpha()); }
};

/** sum_{j<=K} (c b)^j / j!  — polynomial surrogate for e^{c b(x)}. */
inline PolyFourierSum exp_series(const PolyFourierSum& b, Complex c, int order) {
  PolyFourierSum cb = c * b;
  PolyFourierSum acc = PolyFourierSum::constant(1.0);
  PolyFourierSum pow = PolyFourierSum::constant(1.0);
  double fact = 1.0;
  for (int j = 1; j <= order; ++j) {
    pow = pow * cb;
    fact *= j;
    acc = acc + (1.0 / fact) * pow;
  }
  return acc;
}

/** First omitted Taylor magnitude max|c b|^{K+1}/(K+1)! on [-w, w], using the
 *  coefficient-sum bound max|b| <= sum |c_n| e^{|rate_n| w}. */
inline double exp_series_bound(const LadderOperator& op, double c_mag) {
  double bmax = 0.0;
  for (const auto& [n, c] : op.beta.coeffs)
    bmax += std::abs(c) * std::exp(std::abs(mode_rate(op.beta, n)) * op.window);
  const double z = c_mag * bmax;
  double fact = 1.0;
  for (int j = 1; j <= op.exp_series_order + 1; ++j) fact *= j;
  return std::pow(z, op.exp_series_order + 1) / fact;
}

namespace detail {

// multiply f by e^{c * b(x)} along the operator's configured route
inline ExpClassSum mul_exp_of_b(const LadderOperator& op, const ExpClassSum& f,
                                Complex c) {
  if (op.beta.is_trivial()) return f;
  if (op.exact_phase_modes) {
    std::vector<PhaseMode> modes;
    for (const auto& [n, cn] : op.beta.coeffs) {
      if (std::abs(cn) == 0.0) continue;
      modes.push_back({Complex(mode_rate(op.beta, n), 0.0), c * cn});
    }
    return f.mul_exp({}, {}, {}, modes);
  }
  const double bound = exp_series_bound(op, std::abs(c));
  if (bound > op.trunc_tol)
    throw numeric_error("exponential series truncation exceeds tolerance", bound);
  return f.mul_prefactor(exp_series(build_b(op.beta), c, op.exp_series_order));
}

}  // namespace detail

/** alpha (e^{-2 i s beta(x)} f(x) - e^{-i s beta(x)} f(x + is)). */
inline ExpClassSum apply_annihilation(const LadderOperator& op,
                                      const ExpClassSum& f) {
  const double s = op.params.s;
  const Complex is(0.0, s);
  ExpClassSum term1 =
      detail::mul_exp_of_b(op, f.mul_exp({}, -2.0 * is, {}), -2.0 * is);
  ExpClassSum term2 =
      detail::mul_exp_of_b(op, f.shifted(is).mul_exp({}, -is, {}), -is);
  return (term1 - term2).scaled(op.alpha());
}

/** conj(alpha) (e^{2 i s beta(x)} f(x) - [e^{i s beta} f](x + is)): the second
 *  term multiplies first and shifts after — the ordering is part of the
 *  definition and changing it costs a factor e^{-s^2}. */
inline ExpClassSum apply_creation(const LadderOperator& op, const ExpClassSum& f) {
  const double s = op.params.s;
  const Complex is(0.0, s);
  ExpClassSum term1 = detail::mul_exp_of_b(op, f.mul_exp({}, 2.0 * is, {}), 2.0 * is);
  ExpClassSum term2 = detail::mul_exp_of_b(op, f.mul_exp({}, is, {}), is).shifted(is);
  return (term1 - term2).scaled(op.alpha_bar());
}

/** B B† f - q^2 B† B f; equals f identically whenever beta solves the
 *  difference equation beta(x+is) = beta(x) + is. */
inline ExpClassSum apply_q_mutator(const LadderOperator& op, const ExpClassSum& f) {
  const double q2 = op.params.q * op.params.q;
  ExpClassSum bdb = apply_creation(op, apply_annihilation(op, f));
  ExpClassSum bbd = apply_annihilation(op, apply_creation(op, f));
  return bbd - bdb.scaled(q2);
}

/** Small-s truncation of the annihilation operator,
 *  (s/(2 sqrt2)) f'' - (i/sqrt2)(1 - i s beta) f'
 *                    - (i/sqrt2)(beta - (3 i s / 2) beta^2) f. */
inline ExpClassSum apply_weak(const LadderOperator& op, const ExpClassSum& f) {
  const double s = op.params.s;
  const Complex i_unit(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const PolyFourierSum beta = build_beta(op.beta);
  const PolyFourierSum one = PolyFourierSum::constant(1.0);

  ExpClassSum d1 = f.derivative();
  ExpClassSum d2 = d1.derivative();
  ExpClassSum out = d2.scaled(s * 0.5 * inv_sqrt2);
  out = out + d1.mul_prefactor(one - (i_unit * s) * beta)
                  .scaled(-i_unit * inv_sqrt2);
  out = out + f.mul_prefactor(beta - Complex(0.0, 1.5 * s) * (beta * beta))
                  .scaled(-i_unit * inv_sqrt2);
  return out;
}

/** f'' - (2i/s)(1 - i s beta) f' - (2i/s)(beta - (3 i s / 2) beta^2) f,
 *  equal to (2 sqrt2 / s) times the weak operator. */
inline ExpClassSum apply_eigen_L(const LadderOperator& op, const ExpClassSum& f) {
  const double s = op.params.s;
  const Complex two_i_over_s(0.0, 2.0 / s);
  const PolyFourierSum beta = build_beta(op.beta);
  const PolyFourierSum one = PolyFourierSum::constant(1.0);

  ExpClassSum d1 = f.derivative();
  ExpClassSum out = d1.derivative();
  out = out + d1.mul_prefactor(one - Complex(0.0, s) * beta).scaled(-two_i_over_s);
  out = out + f.mul_prefactor(beta - Complex(0.0, 1.5 * s) * (beta * beta))
                  .scaled(-two_i_over_s);
  return out;
}

inline ExpClassSum apply(const LadderOperator& op, const ExpClassSum& f) {
  switch (op.kind) {
    case LadderKind::annihilation: return apply_annihilation(op, f);
    case LadderKind::creation: return apply_creation(op, f);
    case LadderKind::weak_annihilation: return apply_weak(op, f);
    case LadderKind::eigen_L: return apply_eigen_L(op, f);
  }
  throw validation_error("unknown ladder kind");
}

}  // namespace qcs
