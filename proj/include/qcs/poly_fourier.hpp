#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qcs/errors.hpp"

namespace qcs {

using Complex = std::complex<double>;

// Tolerances of the canonical form: frequencies closer than kFreqTol merge,
// and coefficients below kCoeffFloor relative to the largest one are pruned.
inline constexpr double kFreqTol = 1e-12;
inline constexpr double kCoeffFloor = 1e-14;
// Evaluation aborts once a magnitude would exceed 1e300 (exponent bound below).
inline constexpr double kMagnitudeGuard = 1e300;
inline constexpr double kLogMagnitudeGuard = 690.77;  // log(1e300)

inline bool is_zero_freq(Complex mu) { return std::abs(mu) <= kFreqTol; }

/** One term c * x^power * e^{freq * x}. freq is the full complex rate; a pure
 *  oscillation e^{i nu x} is stored as freq = i*nu. */
struct PolyFourierTerm {
  Complex coeff{0.0, 0.0};
  int power = 0;
  Complex freq{0.0, 0.0};
};

/**
 * Finite sum of PolyFourierTerm, closed under addition, multiplication,
 * differentiation, antidifferentiation and argument shift. Terms are kept in
 * canonical order (power, then frequency lexicographically) with duplicate
 * (power, freq) keys merged and relatively negligible coefficients pruned, so
 * no two stored terms share a key.
 */
class PolyFourierSum {
 public:
  PolyFourierSum() = default;
  PolyFourierSum(std::initializer_list<PolyFourierTerm> ts) : terms_(ts) {
    canonicalize();
  }
  explicit PolyFourierSum(std::vector<PolyFourierTerm> ts) : terms_(std::move(ts)) {
    canonicalize();
  }

  static PolyFourierSum zero() { return {}; }
  static PolyFourierSum constant(Complex c) { return PolyFourierSum{{c, 0, {}}}; }
  static PolyFourierSum monomial(Complex c, int power) {
    return PolyFourierSum{{c, power, {}}};
  }
  static PolyFourierSum mode(Complex c, Complex freq) {
    return PolyFourierSum{{c, 0, freq}};
  }
  static PolyFourierSum identity_x() { return monomial(1.0, 1); }
  // coefficients in ascending powers: c0 + c1 x + c2 x^2 + ...
  static PolyFourierSum from_poly_coeffs(const std::vector<Complex>& cs) {
    std::vector<PolyFourierTerm> ts;
    for (std::size_t i = 0; i < cs.size(); ++i)
      ts.push_back({cs[i], static_cast<int>(i), {}});
    return PolyFourierSum(std::move(ts));
  }

  const std::vector<PolyFourierTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_polynomial() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const PolyFourierTerm& t) { return is_zero_freq(t.freq); });
  }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.power);
    return d;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
  }

  // ascending coefficient vector; requires is_polynomial()
  std::vector<Complex> poly_coeffs() const {
    if (!is_polynomial())
      throw validation_error("poly_coeffs: sum contains exponential modes");
    std::vector<Complex> cs(static_cast<std::size_t>(degree()) + 1, Complex{});
    for (const auto& t : terms_) cs[static_cast<std::size_t>(t.power)] += t.coeff;
    return cs;
  }

  Complex evaluate(Complex z) const {
    Complex acc{};
    for (const auto& t : terms_) {
      Complex v = t.coeff;
      for (int p = 0; p < t.power; ++p) v *= z;
      if (!is_zero_freq(t.freq)) {
        const Complex e = t.freq * z;
        if (e.real() > kLogMagnitudeGuard)
          throw numeric_error("mode evaluation exceeds magnitude guard",
                              e.real());
        v *= std::exp(e);
      }
      acc += v;
    }
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
      throw numeric_error("non-finite evaluation result", std::abs(acc));
    return acc;
  }

  PolyFourierSum derivative() const {
    std::vector<PolyFourierTerm> ts;
    for (const auto& t : terms_) {
      if (t.power > 0)
        ts.push_back({t.coeff * static_cast<double>(t.power), t.power - 1, t.freq});
      if (!is_zero_freq(t.freq)) ts.push_back({t.coeff * t.freq, t.power, t.freq});
    }
    return PolyFourierSum(std::move(ts));
  }

  // Antiderivative with the integration constant fixed so that F(0) = 0.
  // Pure powers integrate to x^{m+1}/(m+1); x^m e^{mu x} integrates by parts.
  PolyFourierSum antiderivative() const {
    std::vector<PolyFourierTerm> ts;
    for (const auto& t : terms_) {
      if (is_zero_freq(t.freq)) {
        ts.push_back({t.coeff / static_cast<double>(t.power + 1), t.power + 1, {}});
      } else {
        Complex factor = t.coeff / t.freq;
        double fall = 1.0;  // falling factorial m (m-1) ... (m-j+1)
        for (int j = 0; j <= t.power; ++j) {
          ts.push_back({factor * fall * (j % 2 == 0 ? 1.0 : -1.0),
                        t.power - j, t.freq});
          fall *= static_cast<double>(t.power - j);
          factor /= t.freq;
        }
      }
    }
    PolyFourierSum raw(std::move(ts));
    const Complex at0 = raw.evaluate(0.0);
    return raw - constant(at0);
  }

  // f(x + h) stays in the ring: binomial expansion of (x+h)^m and the phase
  // factor e^{mu h} on each mode.
  PolyFourierSum shifted(Complex h) const {
    std::vector<PolyFourierTerm> ts;
    for (const auto& t : terms_) {
      Complex scale = t.coeff;
      if (!is_zero_freq(t.freq)) scale *= std::exp(t.freq * h);
      double binom = 1.0;
      Complex hp{1.0, 0.0};
      // j runs over the surviving power of x, high to low in h
      for (int j = t.power; j >= 0; --j) {
        const int k = t.power - j;  // power of h
        if (k > 0) {
          binom = binom * static_cast<double>(j + 1) / static_cast<double>(k);
          hp *= h;
        }
        ts.push_back({scale * binom * hp, j, t.freq});
      }
    }
    return PolyFourierSum(std::move(ts));
  }

  PolyFourierSum operator-() const {
    std::vector<PolyFourierTerm> ts = terms_;
    for (auto& t : ts) t.coeff = -t.coeff;
    return PolyFourierSum(std::move(ts));
  }

  friend PolyFourierSum operator+(const PolyFourierSum& a, const PolyFourierSum& b) {
    std::vector<PolyFourierTerm> ts = a.terms_;
    ts.insert(ts.end(), b.terms_.begin(), b.terms_.end());
    return PolyFourierSum(std::move(ts));
  }
  friend PolyFourierSum operator-(const PolyFourierSum& a, const PolyFourierSum& b) {
    return a + (-b);
  }
  friend PolyFourierSum operator*(const PolyFourierSum& a, const PolyFourierSum& b) {
    std::vector<PolyFourierTerm> ts;
    ts.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_)
        ts.push_back({ta.coeff * tb.coeff, ta.power + tb.power, ta.freq + tb.freq});
    return PolyFourierSum(std::move(ts));
  }
  friend PolyFourierSum operator*(Complex c, const PolyFourierSum& a) {
    std::vector<PolyFourierTerm> ts = a.terms_;
    for (auto& t : ts) t.coeff *= c;
    return PolyFourierSum(std::move(ts));
  }
  friend PolyFourierSum operator*(const PolyFourierSum& a, Complex c) { return c * a; }

  PolyFourierSum pow(int n) const {
    PolyFourierSum acc = constant(1.0);
    for (int i = 0; i < n; ++i) acc = acc * (*this);
    return acc;
  }

 private:
  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const PolyFourierTerm& a, const PolyFourierTerm& b) {
                if (a.power != b.power) return a.power < b.power;
                if (a.freq.real() != b.freq.real())
                  return a.freq.real() < b.freq.real();
                return a.freq.imag() < b.freq.imag();
              });
    std::vector<PolyFourierTerm> merged;
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().power == t.power &&
          std::abs(merged.back().freq - t.freq) <= kFreqTol) {
        merged.back().coeff += t.coeff;
      } else {
        merged.push_back(t);
      }
    }
    double mx = 0.0;
    for (const auto& t : merged) mx = std::max(mx, std::abs(t.coeff));
    terms_.clear();
    for (auto& t : merged) {
      if (std::abs(t.coeff) > kCoeffFloor * mx && std::abs(t.coeff) > 0.0) {
        if (is_zero_freq(t.freq)) t.freq = Complex{};
        terms_.push_back(t);
      }
    }
  }

  std::vector<PolyFourierTerm> terms_;
};

/** Largest coefficient of a - b in the canonical key basis. */
inline double coeff_distance(const PolyFourierSum& a, const PolyFourierSum& b) {
  return (a - b).max_abs_coeff();
}

}  // namespace qcs
