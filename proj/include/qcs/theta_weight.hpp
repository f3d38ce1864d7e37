#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qcs/errors.hpp"
#include "qcs/quadrature.hpp"
#include "qcs/states.hpp"

namespace qcs {

// Adaptive series cutoffs stop once the next term drops below this fraction
// of the running partial sum.
inline constexpr double kSeriesTailRel = 1e-16;

/**
 * theta3(z | tau) = sum_n exp(i pi tau n^2 + 2 i n z), summed symmetrically
 * with an adaptive cutoff.  Requires Im(tau) > 0 for convergence.
 */
inline Complex theta3(Complex z, Complex tau) {
  if (!(tau.imag() > 0.0))
    throw validation_error("theta3 requires Im(tau) > 0");
  const Complex ipi(0.0, M_PI);
  Complex acc(1.0, 0.0);
  for (int n = 1; n <= 1000; ++n) {
    const Complex gauss = ipi * tau * static_cast<double>(n * n);
    const Complex osc(0.0, 2.0 * n);
    // |exp(±2inz)| = exp(∓2n Im z), so the larger of the pair dominates
    const double worst_log = gauss.real() + 2.0 * n * std::abs(z.imag());
    if (worst_log > kLogMagnitudeGuard)
      throw numeric_error("theta3 term exceeds magnitude guard", worst_log);
    acc += std::exp(gauss + osc * z) + std::exp(gauss - osc * z);
    // cut on the zero-free envelope, not the term itself: an oscillation zero
    // (e.g. cos(2nz) = 0) must not truncate the series early
    if (2.0 * std::exp(worst_log) < kSeriesTailRel * std::abs(acc)) return acc;
  }
  throw numeric_error("theta3 series did not converge within 1000 terms", 0.0);
}

/**
 * Lattice weight descriptor.  gamma_re comes from the minus-branch exponent
 * slope; reparam selects the renamed-scale convention (lattice scale B = s^2,
 * i.e. the weight written after an s -> sqrt2 s substitution) versus the
 * state-consistent convention (B = s^2/2, the scale that actually appears in
 * |periodicity factor|^2).
 */
struct WeightFunction {
  CSParameters params;
  double gamma_re = 0.0;
  bool reparam = true;
  int max_terms = 2000;
};

inline WeightFunction make_weight(const CSConstruction& cs, bool reparam = true) {
  WeightFunction w;
  w.params = cs.params;
  w.gamma_re = cs.spectral.gamma_re;
  w.reparam = reparam;
  return w;
}

namespace detail {

// sum over n in Z of exp(-B n^2 - 2 n c), adaptively truncated
inline double lattice_sum(double b, double c, int max_terms) {
  if (!(b > 0.0)) throw validation_error("lattice scale must be positive");
  if (c * c / b > kLogMagnitudeGuard)
    throw numeric_error("lattice sum exceeds magnitude guard", c * c / b);
  double acc = 1.0;
  for (int n = 1; n <= max_terms; ++n) {
    const double gauss = -b * static_cast<double>(n) * n;
    const double term =
        std::exp(gauss - 2.0 * n * c) + std::exp(gauss + 2.0 * n * c);
    acc += term;
    if (term < kSeriesTailRel * acc) return acc;
  }
  throw numeric_error("lattice sum did not converge", 0.0);
}

inline double lattice_scale(const WeightFunction& w) {
  const double s2 = w.params.s * w.params.s;
  return w.reparam ? s2 : 0.5 * s2;
}

// argument substitution x -> a t, staying inside the function class
inline PolyFourierSum scale_argument(const PolyFourierSum& p, Complex a) {
  std::vector<PolyFourierTerm> ts;
  for (const auto& t : p.terms())
    ts.push_back({t.coeff * std::pow(a, t.power), t.power, t.freq * a});
  return PolyFourierSum(std::move(ts));
}

inline ExpClassFunction scale_argument(const ExpClassFunction& f, Complex a) {
  std::vector<PhaseMode> modes;
  for (const auto& m : f.modes()) modes.push_back({m.freq * a, m.amp});
  return ExpClassFunction(scale_argument(f.prefactor(), a), f.quad() * a * a,
                          f.lin() * a, f.cst(), std::move(modes));
}

}  // namespace detail

/** Direct lattice sum sum_n exp(-B n^2 - 2 n (gamma_re + (B/2 pi) t)) in the
 *  convention selected by w.reparam; real and positive. */
inline double sigma_lattice(const WeightFunction& w, double t) {
  const double b = detail::lattice_scale(w);
  const double c = w.gamma_re + b / (2.0 * M_PI) * t;
  return detail::lattice_sum(b, c, w.max_terms);
}

/** Closed form (sqrt pi / u) exp[((u/2 pi) t + gamma_re/u)^2]
 *  theta3(t/2 + pi gamma_re/u^2 | i pi/u^2) with u^2 the lattice scale;
 *  equals sigma_lattice by the Jacobi imaginary transformation. */
inline double sigma_closed(const WeightFunction& w, double t) {
  const double b = detail::lattice_scale(w);
  const double u = std::sqrt(b);
  const double c = w.gamma_re + b / (2.0 * M_PI) * t;
  if (c * c / b > kLogMagnitudeGuard)
    throw numeric_error("closed weight exceeds magnitude guard", c * c / b);
  const Complex z(0.5 * t + M_PI * w.gamma_re / b, 0.0);
  const Complex tau(0.0, M_PI / b);
  return std::sqrt(M_PI) / u * std::exp(c * c / b) * theta3(z, tau).real();
}

/** State-consistent weight sum_n |periodicity factor(n, t)|^2, i.e. the
 *  lattice sum at scale B = s^2/2 whatever w.reparam says.  This is the
 *  weight under which the interval folding reproduces the direct integral. */
inline double sigma_state(const WeightFunction& w, double t) {
  const double b = 0.5 * w.params.s * w.params.s;
  const double c = w.gamma_re + b / (2.0 * M_PI) * t;
  return detail::lattice_sum(b, c, w.max_terms);
}

/** Minus-branch state pulled onto the circle via x = (i s / 2 pi) t; the
 *  deformation modes become integer frequencies e^{i n t}. */
inline ExpClassFunction t_representation(const CSConstruction& cs) {
  const Complex a(0.0, cs.params.s / (2.0 * M_PI));
  return detail::scale_argument(cs.state_minus, a);
}

/** exp(-n gamma_s^- - n (s^2/4 pi) t - n^2 s^2/4): the factor relating the
 *  t-state across one period, Lambda(t + 2 pi n) = factor(n, t) Lambda(t). */
inline Complex periodicity_factor(const CSConstruction& cs, int n, double t) {
  const double s2 = cs.params.s * cs.params.s;
  const Complex expo = -static_cast<double>(n) * cs.spectral.gamma_minus -
                       Complex(n * s2 / (4.0 * M_PI) * t, 0.0) -
                       Complex(n * n * s2 / 4.0, 0.0);
  return std::exp(expo);
}

/** Measured deviation of the periodicity relation over 21 points of
 *  [-pi, pi], relative to the shifted state magnitude. */
inline double periodicity_deviation(const CSConstruction& cs, int n) {
  const ExpClassFunction state = t_representation(cs);
  double worst = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double t = -M_PI + M_PI * k / 10.0;
    const Complex lhs = state.evaluate(Complex(t + 2.0 * M_PI * n, 0.0));
    const Complex rhs =
        periodicity_factor(cs, n, t) * state.evaluate(Complex(t, 0.0));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
  }
  return worst;
}

/** Composite-Simpson integral of conj(state) * weight * state over one
 *  period; weight is any real-valued callable of t. */
template <typename W>
Complex weighted_norm_integral(const ExpClassFunction& state_t, W&& weight,
                               std::size_t n_nodes) {
  return simpson(
      [&](double t) {
        const Complex v = state_t.evaluate(Complex(t, 0.0));
        return std::conj(v) * v * weight(t);
      },
      -M_PI, M_PI, n_nodes);
}

/** Full complex integral of conj(Lambda) sigma Lambda; the imaginary part is
 *  a rounding artifact of an identically real integrand. */
inline Complex unity_integral(const CSConstruction& cs, const WeightFunction& w,
                              std::size_t n_nodes = 2001) {
  const ExpClassFunction state = t_representation(cs);
  return weighted_norm_integral(
      state, [&](double t) { return sigma_state(w, t); }, n_nodes);
}

/** Real unity scalar.  Always integrates against the state-consistent weight:
 *  with the renamed-scale weight the folding identity would acquire a
 *  spurious s -> sqrt2 s mismatch; w.reparam only affects the sigma audits. */
inline double unity_scalar(const CSConstruction& cs, const WeightFunction& w,
                           std::size_t n_nodes = 2001) {
  return unity_integral(cs, w, n_nodes).real();
}

/** 1/sqrt(unity): scaling the state by this makes the unity scalar 1. */
inline double normalization(const CSConstruction& cs, const WeightFunction& w,
                            std::size_t n_nodes = 2001) {
  const double u = unity_scalar(cs, w, n_nodes);
  if (!(u > 0.0) || !std::isfinite(u))
    throw numeric_error("unity scalar is not positive", u);
  return 1.0 / std::sqrt(u);
}

/**
 * Folding audit: the direct weighted integral against the m-truncated sum of
 * period-interval contributions |factor(n, t)|^2 |Lambda(t)|^2.  tail is the
 * computed remainder of bands beyond m (summed until negligible), so
 * |direct - folded| should sit within tail up to quadrature rounding.
 */
struct FoldReport {
  double direct = 0.0;
  double folded = 0.0;
  double agreement = 0.0;
  double tail = 0.0;
  int m_max = 0;
  bool tail_decaying = true;
};

inline FoldReport fold_consistency(const CSConstruction& cs,
                                   const WeightFunction& w, int m_max = 8,
                                   std::size_t n_nodes = 2001) {
  if (m_max < 1) throw validation_error("fold needs at least one band");
  const ExpClassFunction state = t_representation(cs);
  auto band = [&](int n) {
    return weighted_norm_integral(
               state,
               [&](double t) { return std::norm(periodicity_factor(cs, n, t)); },
               n_nodes)
        .real();
  };

  FoldReport rep;
  rep.m_max = m_max;
  rep.direct = unity_scalar(cs, w, n_nodes);
  double total = band(0);
  rep.folded = total;
  double previous_band = total;
  for (int n = 1; n <= 64; ++n) {
    const double contribution = band(n) + band(-n);
    total += contribution;
    if (n <= m_max) rep.folded = total;
    if (n > m_max && contribution > previous_band) rep.tail_decaying = false;
    previous_band = contribution;
    if (contribution < kSeriesTailRel * total && n > m_max) break;
  }
  rep.tail = total - rep.folded;
  rep.agreement = std::abs(rep.direct - rep.folded);
  return rep;
}

}  // namespace qcs
