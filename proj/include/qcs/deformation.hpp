#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "qcs/errors.hpp"
#include "qcs/log.hpp"
#include "qcs/poly_fourier.hpp"

namespace qcs {

inline constexpr int kMaxModeIndex = 32;

/**
 * Truncated Fourier description of the periodic part b of the deformation
 * function beta(x) = x + b(x). Each mode c_n e^{2 n pi x / s} returns to
 * itself under x -> x + is, so beta satisfies the difference equation
 * beta(x + is) = beta(x) + is by construction.
 */
struct PeriodicDeformation {
  double s = 1.0;
  std::map<int, Complex> coeffs;  // n -> c_n

  // true when b vanishes identically (beta(x) = x)
  bool is_trivial() const {
    return std::all_of(coeffs.begin(), coeffs.end(),
                       [](const auto& kv) { return std::abs(kv.second) == 0.0; });
  }

  void validate() const {
    if (!(s > 0.0)) throw validation_error("deformation scale s must be positive");
    for (const auto& [n, c] : coeffs) {
      if (std::abs(n) > kMaxModeIndex)
        throw validation_error("deformation mode index exceeds supported range");
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw validation_error("deformation coefficient is not finite");
    }
  }
};

/** Mode rate on the x-line: e^{2 n pi x / s}. */
inline double mode_rate(const PeriodicDeformation& d, int n) {
  return 2.0 * static_cast<double>(n) * M_PI / d.s;
}

/** b(x) = sum_n c_n e^{2 n pi x / s} as a ring element. */
inline PolyFourierSum build_b(const PeriodicDeformation& d) {
  d.validate();
  std::vector<PolyFourierTerm> ts;
  for (const auto& [n, c] : d.coeffs) {
    if (std::abs(c) == 0.0) continue;
    ts.push_back({c, 0, Complex(mode_rate(d, n), 0.0)});
  }
  return PolyFourierSum(std::move(ts));
}

/** beta(x) = x + b(x). */
inline PolyFourierSum build_beta(const PeriodicDeformation& d) {
  return PolyFourierSum::identity_x() + build_b(d);
}

/**
 * The same b on the circle parameter t, using x = (is / 2 pi) t: each mode
 * becomes c_n e^{i n t}, a genuine 2 pi-periodic Fourier polynomial.
 */
inline PolyFourierSum build_b_circle(const PeriodicDeformation& d) {
  d.validate();
  std::vector<PolyFourierTerm> ts;
  for (const auto& [n, c] : d.coeffs) {
    if (std::abs(c) == 0.0) continue;
    ts.push_back({c, 0, Complex(0.0, static_cast<double>(n))});
  }
  return PolyFourierSum(std::move(ts));
}

/**
 * n-th Fourier coefficient (1/2pi) int_{-pi}^{pi} f(t) e^{-i n t} dt of a
 * 2 pi-periodic function, by the uniform trapezoid rule (spectrally exact for
 * trigonometric polynomials of degree < nodes/2).
 */
template <typename F>
Complex fourier_coefficient(F&& f, int n, int nodes = 1024) {
  if (nodes < 256) nodes = 256;
  Complex acc{};
  for (int j = 0; j < nodes; ++j) {
    const double t = -M_PI + 2.0 * M_PI * j / nodes;
    const Complex v = f(t);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw numeric_error("non-finite sample in Fourier coefficient", std::abs(v));
    acc += v * std::exp(Complex(0.0, -static_cast<double>(n) * t));
  }
  return acc / static_cast<double>(nodes);
}

/** Max over a uniform grid of |beta(x+is) - beta(x) - is|. */
inline double difference_equation_residual(const PeriodicDeformation& d,
                                           double lo, double hi,
                                           int points = 21) {
  const PolyFourierSum beta = build_beta(d);
  const Complex is(0.0, d.s);
  double worst = 0.0;
  for (int j = 0; j < points; ++j) {
    const double x = lo + (hi - lo) * j / (points - 1);
    worst = std::max(worst,
                     std::abs(beta.evaluate(Complex(x, 0.0) + is) -
                              beta.evaluate(Complex(x, 0.0)) - is));
  }
  return worst;
}

/**
 * Largest log-magnitude the modes reach on [-w, w]. Rates 2 n pi / s blow up
 * quickly for small s, so callers compare this against the overflow guard
 * before evaluating on a window.
 */
inline double max_mode_log_magnitude(const PeriodicDeformation& d, double w) {
  double worst = 0.0;
  for (const auto& [n, c] : d.coeffs) {
    if (std::abs(c) == 0.0) continue;
    const double log_c = std::log(std::abs(c));
    worst = std::max(worst, std::abs(mode_rate(d, n)) * std::abs(w) + log_c);
  }
  return worst;
}

inline void warn_if_window_overflows(const PeriodicDeformation& d, double w) {
  const double m = max_mode_log_magnitude(d, w);
  if (m > kLogMagnitudeGuard) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "deformation modes reach log-magnitude %.3g on [-%g, %g]; "
                  "evaluation may hit the overflow guard",
                  m, w, w);
    log::info(buf);
  }
}

}  // namespace qcs
