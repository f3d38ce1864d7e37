#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "qcs/errors.hpp"

namespace qcs {

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = 0.5 * (lo + hi);
    return g;
  }
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

/** Composite Simpson rule with n_nodes equally spaced nodes (forced odd). */
template <typename F>
auto simpson(F&& f, double a, double b, std::size_t n_nodes) {
  if (n_nodes < 3) n_nodes = 3;
  if (n_nodes % 2 == 0) ++n_nodes;
  const double h = (b - a) / static_cast<double>(n_nodes - 1);
  using R = decltype(f(a));
  R acc = f(a) + f(b);
  for (std::size_t i = 1; i + 1 < n_nodes; ++i) {
    const double x = a + h * static_cast<double>(i);
    acc += f(x) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * (h / 3.0);
}

/**
 * Cumulative integral on a uniform grid: returns F with F[0] = 0 and
 * F[i] = integral from grid[0] to grid[i]. Each panel uses a Simpson step
 * with a midpoint evaluation, so the rule is fourth order.
 */
template <typename F>
auto cumulative_simpson(F&& f, const std::vector<double>& grid)
    -> std::vector<decltype(f(grid[0]))> {
  using R = decltype(f(grid[0]));
  std::vector<R> out(grid.size());
  out[0] = R{};
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = grid[i - 1], b = grid[i], m = 0.5 * (a + b);
    out[i] = out[i - 1] + (f(a) + 4.0 * f(m) + f(b)) * ((b - a) / 6.0);
  }
  return out;
}

/** Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n. */
inline void gauss_legendre_nodes(std::size_t n, std::vector<double>& x,
                                 std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Tricomi initial guess for the i-th positive root.
    double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(j) + 1.0) * z * p1 -
              static_cast<double>(j) * p2) /
             (static_cast<double>(j) + 1.0);
      }
      pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

template <typename F>
auto gauss_legendre(F&& f, double a, double b, std::size_t n_nodes) {
  std::vector<double> x, w;
  gauss_legendre_nodes(n_nodes, x, w);
  using R = decltype(f(a));
  R acc{};
  const double c = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < n_nodes; ++i) acc += f(mid + c * x[i]) * w[i];
  return acc * c;
}

/**
 * Classical RK4 on y' = f(x, y) with complex state. Integrates from x0 to x1
 * (either direction) with |step| as the nominal step; the last step is
 * shortened to land on x1. Throws pole_error when |y| exceeds blowup_guard.
 */
template <typename F>
std::vector<std::pair<double, std::complex<double>>> rk4_path(
    F&& f, std::complex<double> y0, double x0, double x1, double step,
    double blowup_guard = 1e8) {
  using C = std::complex<double>;
  std::vector<std::pair<double, C>> path;
  const double dir = x1 >= x0 ? 1.0 : -1.0;
  const double h0 = dir * std::abs(step);
  double x = x0;
  C y = y0;
  path.emplace_back(x, y);
  while (dir * (x1 - x) > 1e-15) {
    double h = h0;
    if (dir * (x + h - x1) > 0.0) h = x1 - x;
    const C k1 = f(x, y);
    const C k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    const C k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    const C k4 = f(x + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x += h;
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()) ||
        std::abs(y) > blowup_guard)
      throw pole_error("trajectory blow-up (likely pole)", x);
    path.emplace_back(x, y);
  }
  return path;
}

/** Least-squares slope of log(y) against log(x); also returns the 95% band. */
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width_95 = 0.0;  // half of the confidence interval on slope
};

inline SlopeFit fit_loglog_slope(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n)
    throw validation_error("slope fit needs at least two (x, y) pairs");
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (xs[i] <= 0.0 || ys[i] <= 0.0)
      throw validation_error("slope fit needs positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
      ss += r * r;
    }
    const double se = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
    // two-sided t quantiles at 97.5% for small n (n-2 degrees of freedom)
    static const double t975[] = {0.0, 12.706, 4.303, 3.182, 2.776,
                                  2.571, 2.447, 2.365, 2.306, 2.262};
    const std::size_t dof = n - 2;
    const double t = dof < 10 ? t975[dof] : 2.0;
    fit.half_width_95 = t * se;
  }
  return fit;
}

}  // namespace qcs
