#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qcs/errors.hpp"
#include "qcs/poly_fourier.hpp"
#include "qcs/rng.hpp"

namespace qcs {

/** One exponent term d * e^{freq * x} living inside the outer exponential. */
struct PhaseMode {
  Complex freq{};
  Complex amp{};
};

inline std::vector<PhaseMode> canonical_modes(std::vector<PhaseMode> ms) {
  std::sort(ms.begin(), ms.end(), [](const PhaseMode& a, const PhaseMode& b) {
    if (a.freq.real() != b.freq.real()) return a.freq.real() < b.freq.real();
    return a.freq.imag() < b.freq.imag();
  });
  std::vector<PhaseMode> out;
  for (const auto& m : ms) {
    if (!out.empty() && std::abs(out.back().freq - m.freq) <= kFreqTol)
      out.back().amp += m.amp;
    else
      out.push_back(m);
  }
  std::erase_if(out, [](const PhaseMode& m) { return std::abs(m.amp) == 0.0; });
  return out;
}

/**
 * P(x) * exp(quad x^2 + lin x + cst + sum_k amp_k e^{freq_k x}) with P a
 * PolyFourierSum. The split between prefactor, cst and modes is not unique
 * (e^{c} can live in either factor), so equality of two values is decided by
 * evaluation on a fixed sample set, not structurally.
 */
class ExpClassFunction {
 public:
  ExpClassFunction() : prefactor_(PolyFourierSum::constant(1.0)) {}
  ExpClassFunction(PolyFourierSum prefactor, Complex quad, Complex lin, Complex cst,
                   std::vector<PhaseMode> modes = {})
      : prefactor_(std::move(prefactor)),
        quad_(quad),
        lin_(lin),
        cst_(cst),
        modes_(canonical_modes(std::move(modes))) {}

  static ExpClassFunction one() { return {}; }
  static ExpClassFunction from_exponent(Complex quad, Complex lin, Complex cst,
                                        std::vector<PhaseMode> modes = {}) {
    return {PolyFourierSum::constant(1.0), quad, lin, cst, std::move(modes)};
  }

  const PolyFourierSum& prefactor() const { return prefactor_; }
  Complex quad() const { return quad_; }
  Complex lin() const { return lin_; }
  Complex cst() const { return cst_; }
  const std::vector<PhaseMode>& modes() const { return modes_; }

  Complex exponent_at(Complex z) const {
    Complex e = (quad_ * z + lin_) * z + cst_;
    for (const auto& m : modes_) {
      const Complex a = m.freq * z;
      if (a.real() > kLogMagnitudeGuard)
        throw numeric_error("phase mode exceeds magnitude guard", a.real());
      e += m.amp * std::exp(a);
    }
    return e;
  }

  Complex evaluate(Complex z) const {
    const Complex p = prefactor_.evaluate(z);
    const Complex e = exponent_at(z);
    const double logp = std::abs(p) > 0.0 ? std::log(std::abs(p)) : 0.0;
    if (e.real() > kLogMagnitudeGuard ||
        e.real() + std::max(logp, 0.0) > kLogMagnitudeGuard)
      throw numeric_error("evaluation exceeds magnitude guard", e.real());
    const Complex v = p * std::exp(e);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw numeric_error("non-finite evaluation result", std::abs(v));
    return v;
  }

  // d/dx pulls the exponent derivative into the prefactor ring.
  ExpClassFunction derivative() const {
    PolyFourierSum expd = PolyFourierSum::monomial(2.0 * quad_, 1) +
                          PolyFourierSum::constant(lin_);
    for (const auto& m : modes_)
      expd = expd + PolyFourierSum::mode(m.amp * m.freq, m.freq);
    return {prefactor_.derivative() + prefactor_ * expd, quad_, lin_, cst_, modes_};
  }

  // f(x + h): quadratic part feeds the linear and constant terms, every phase
  // mode picks up the factor e^{freq h}.
  ExpClassFunction shifted(Complex h) const {
    std::vector<PhaseMode> ms = modes_;
    for (auto& m : ms) m.amp *= std::exp(m.freq * h);
    return {prefactor_.shifted(h), quad_, lin_ + 2.0 * quad_ * h,
            cst_ + (quad_ * h + lin_) * h, std::move(ms)};
  }

  // multiply by exp(dq x^2 + dl x + dc + sum modes)
  ExpClassFunction mul_exp(Complex dq, Complex dl, Complex dc,
                           std::vector<PhaseMode> add_modes = {}) const {
    std::vector<PhaseMode> ms = modes_;
    ms.insert(ms.end(), add_modes.begin(), add_modes.end());
    return {prefactor_, quad_ + dq, lin_ + dl, cst_ + dc, std::move(ms)};
  }

  ExpClassFunction mul_prefactor(const PolyFourierSum& p) const {
    return {prefactor_ * p, quad_, lin_, cst_, modes_};
  }

  ExpClassFunction scaled(Complex c) const {
    return {c * prefactor_, quad_, lin_, cst_, modes_};
  }

  friend ExpClassFunction operator*(const ExpClassFunction& a,
                                    const ExpClassFunction& b) {
    std::vector<PhaseMode> ms = a.modes_;
    ms.insert(ms.end(), b.modes_.begin(), b.modes_.end());
    return {a.prefactor_ * b.prefactor_, a.quad_ + b.quad_, a.lin_ + b.lin_,
            a.cst_ + b.cst_, std::move(ms)};
  }

  bool same_exponent(const ExpClassFunction& o, double tol = 1e-14) const {
    if (std::abs(quad_ - o.quad_) > tol || std::abs(lin_ - o.lin_) > tol)
      return false;
    if (modes_.size() != o.modes_.size()) return false;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (std::abs(modes_[i].freq - o.modes_[i].freq) > tol) return false;
      if (std::abs(modes_[i].amp - o.modes_[i].amp) > tol) return false;
    }
    return true;
  }

 private:
  PolyFourierSum prefactor_;
  Complex quad_{}, lin_{}, cst_{};
  std::vector<PhaseMode> modes_;
};

/**
 * Finite sum of exponential atoms. The exact ladder operators split one atom
 * into a multiply piece and a shift piece with different linear exponents, so
 * closure under them requires sums. Atoms whose exponents coincide are merged
 * (the constant-term difference folds exactly into the prefactor).
 */
class ExpClassSum {
 public:
  ExpClassSum() = default;
  ExpClassSum(const ExpClassFunction& f) : atoms_{f} {}  // NOLINT(implicit)
  explicit ExpClassSum(std::vector<ExpClassFunction> atoms)
      : atoms_(std::move(atoms)) {}

  static ExpClassSum zero() { return ExpClassSum(std::vector<ExpClassFunction>{}); }

  const std::vector<ExpClassFunction>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool is_zero() const { return atoms_.empty(); }

  Complex evaluate(Complex z) const {
    Complex acc{};
    for (const auto& a : atoms_) acc += a.evaluate(z);
    return acc;
  }

  ExpClassSum derivative() const {
    std::vector<ExpClassFunction> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.derivative());
    return ExpClassSum(std::move(out));
  }

  ExpClassSum shifted(Complex h) const {
    std::vector<ExpClassFunction> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.shifted(h));
    return ExpClassSum(std::move(out));
  }

  ExpClassSum mul_exp(Complex dq, Complex dl, Complex dc,
                      const std::vector<PhaseMode>& modes = {}) const {
    std::vector<ExpClassFunction> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.mul_exp(dq, dl, dc, modes));
    return ExpClassSum(std::move(out));
  }

  ExpClassSum mul_prefactor(const PolyFourierSum& p) const {
    std::vector<ExpClassFunction> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.mul_prefactor(p));
    return ExpClassSum(std::move(out));
  }

  ExpClassSum scaled(Complex c) const {
    std::vector<ExpClassFunction> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.scaled(c));
    return ExpClassSum(std::move(out));
  }

  friend ExpClassSum operator+(const ExpClassSum& a, const ExpClassSum& b) {
    std::vector<ExpClassFunction> out = a.atoms_;
    for (const auto& atom : b.atoms_) append_merged(out, atom);
    return ExpClassSum(std::move(out));
  }
  friend ExpClassSum operator-(const ExpClassSum& a, const ExpClassSum& b) {
    return a + b.scaled(-1.0);
  }
  friend ExpClassSum operator*(const ExpClassSum& a, const ExpClassSum& b) {
    std::vector<ExpClassFunction> out;
    out.reserve(a.atoms_.size() * b.atoms_.size());
    for (const auto& x : a.atoms_)
      for (const auto& y : b.atoms_) append_merged(out, x * y);
    return ExpClassSum(std::move(out));
  }

 private:
  static void append_merged(std::vector<ExpClassFunction>& atoms,
                            const ExpClassFunction& f) {
    for (auto& a : atoms) {
      if (a.same_exponent(f)) {
        const Complex fold = std::exp(f.cst() - a.cst());
        a = ExpClassFunction(a.prefactor() + fold * f.prefactor(), a.quad(),
                             a.lin(), a.cst(), a.modes());
        return;
      }
    }
    atoms.push_back(f);
  }

  std::vector<ExpClassFunction> atoms_;
};

/**
 * exp of a ring element: the exponent may hold powers of x up to 2 plus pure
 * exponential modes, which map onto the quad/lin/cst/phase-mode slots. Mixed
 * terms (x^m e^{mu x} with m > 0) or cubic powers leave the class.
 */
inline ExpClassFunction exp_of(const PolyFourierSum& exponent) {
  Complex quad{}, lin{}, cst{};
  std::vector<PhaseMode> modes;
  for (const auto& t : exponent.terms()) {
    if (is_zero_freq(t.freq)) {
      if (t.power == 0)
        cst += t.coeff;
      else if (t.power == 1)
        lin += t.coeff;
      else if (t.power == 2)
        quad += t.coeff;
      else
        throw validation_error("exponent power exceeds the quadratic class");
    } else {
      if (t.power != 0)
        throw validation_error("exponent mixes powers with exponential modes");
      modes.push_back({t.freq, t.coeff});
    }
  }
  return ExpClassFunction::from_exponent(quad, lin, cst, std::move(modes));
}

/** Fixed sample set used for evaluation-based equality: 21 real points on
 *  [-pi, pi] plus 8 seeded complex points. */
inline const std::vector<Complex>& equality_samples() {
  static const std::vector<Complex> samples = [] {
    std::vector<Complex> s;
    for (int i = 0; i < 21; ++i)
      s.emplace_back(-M_PI + 2.0 * M_PI * i / 20.0, 0.0);
    Rng rng(0x51ab5eedULL);
    for (int i = 0; i < 8; ++i) s.push_back(rng.complex_in_box(1.5));
    return s;
  }();
  return samples;
}

template <typename A, typename B>
double sample_distance(const A& f, const B& g) {
  double d = 0.0;
  for (const Complex& z : equality_samples())
    d = std::max(d, std::abs(f.evaluate(z) - g.evaluate(z)));
  return d;
}

template <typename A, typename B>
bool approx_equal(const A& f, const B& g, double tol = 1e-10) {
  double scale = 0.0;
  for (const Complex& z : equality_samples())
    scale = std::max(scale, std::abs(f.evaluate(z)));
  return sample_distance(f, g) <= tol * (1.0 + scale);
}

inline std::vector<double> uniform_grid_points(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

/** Max-abs distance on a uniform real grid (window residual norm). */
template <typename A, typename B>
double grid_distance(const A& f, const B& g, double lo = -3.0, double hi = 3.0,
                     std::size_t n = 21) {
  double d = 0.0;
  for (double x : uniform_grid_points(lo, hi, n))
    d = std::max(d, std::abs(f.evaluate(Complex(x, 0.0)) -
                             g.evaluate(Complex(x, 0.0))));
  return d;
}

/** Bounded random atom for property tests and the algebra-check command. */
struct RandomAtomOptions {
  int max_prefactor_terms = 5;
  int max_power = 3;
  double coeff_box = 1.0;
  int max_phase_modes = 2;
  double mode_amp_box = 0.4;
};

inline ExpClassFunction random_exp_class(Rng& rng,
                                         const RandomAtomOptions& opt = {}) {
  std::vector<PolyFourierTerm> terms;
  const int nt = rng.uniform_int(1, opt.max_prefactor_terms);
  for (int i = 0; i < nt; ++i) {
    PolyFourierTerm t;
    t.coeff = rng.complex_in_box(opt.coeff_box);
    t.power = rng.uniform_int(0, opt.max_power);
    if (rng.coin())
      t.freq = Complex(0.0, rng.uniform(-2.0, 2.0));
    else
      t.freq = Complex{};
    terms.push_back(t);
  }
  const Complex quad(rng.uniform(-0.55, -0.1), rng.uniform(-0.25, 0.25));
  const Complex lin = rng.complex_in_box(0.8);
  const Complex cst = rng.complex_in_box(0.8);
  std::vector<PhaseMode> modes;
  const int nm = rng.uniform_int(0, opt.max_phase_modes);
  for (int i = 0; i < nm; ++i) {
    const double nu = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.4, 2.0);
    modes.push_back({Complex(0.0, nu), rng.complex_in_box(opt.mode_amp_box)});
  }
  return {PolyFourierSum(std::move(terms)), quad, lin, cst, std::move(modes)};
}

}  // namespace qcs
