#pragma once

// Scalar and planar numerical kernels: golden-section maximization of
// unimodal functions, geometric bracketing of an interior maximum, bisection
// and a damped Newton solver for 2-D stationarity systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "relaypower/core_model.hpp"

namespace relaypower {

/// Bracket expansion ran out of iterations.
struct BracketError : NumericalError {
  using NumericalError::NumericalError;
};

/// Caller violated a documented precondition (e.g. no sign change).
struct PreconditionError : Error {
  using Error::Error;
};

struct SearchConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-10;
  int max_iter = 200;
  double bracket_growth = 2.0;
  double bracket_seed = 1.0;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ValidationError("SearchConfig: tolerances must be > 0");
    if (max_iter < 1) throw ValidationError("SearchConfig: max_iter must be >= 1");
    if (!(bracket_growth > 1.0)) throw ValidationError("SearchConfig: bracket_growth must be > 1");
    if (!(bracket_seed > 0.0)) throw ValidationError("SearchConfig: bracket_seed must be > 0");
  }
};

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

using Point2 = std::array<double, 2>;

namespace detail {

template <class F>
double checked_eval(F& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw NumericalError("non-finite function value at x = " + std::to_string(x));
  }
  return v;
}

inline double norm_inf(const Point2& p) { return std::max(std::abs(p[0]), std::abs(p[1])); }

inline bool finite(const Point2& p) { return std::isfinite(p[0]) && std::isfinite(p[1]); }

}  // namespace detail

/// Golden-section search for the maximum of a function that is unimodal on
/// [lo, hi]. The returned point is never worse than either endpoint.
template <class F>
Maximum maximize_unimodal(F&& f, double lo, double hi, const SearchConfig& cfg = {}) {
  cfg.validate();
  if (!(lo <= hi)) throw ValidationError("maximize_unimodal: lo must not exceed hi");

  constexpr double inv_phi = std::numbers::phi - 1.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = detail::checked_eval(f, c);
  double fd = detail::checked_eval(f, d);

  for (int it = 0; it < cfg.max_iter; ++it) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (b - a <= std::max(cfg.abs_tol, cfg.rel_tol * scale)) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = detail::checked_eval(f, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = detail::checked_eval(f, d);
    }
  }

  Maximum best = fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
  for (double x : {lo, hi}) {
    const double v = detail::checked_eval(f, x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

/// Finds [lo, hi] with lo = 0 (or a point reached while expanding) such that
/// some interior point beats both ends. Needs f increasing near 0+ and
/// eventually decreasing; f must be defined at 0.
template <class F>
Bracket bracket_above(F&& f, const SearchConfig& cfg = {}) {
  cfg.validate();
  double a = 0.0;
  double fa = detail::checked_eval(f, a);
  double m = cfg.bracket_seed;
  double fm = detail::checked_eval(f, m);
  int it = 0;
  // The maximum may sit below the seed: pull the midpoint toward 0.
  while (!(fm > fa)) {
    if (++it > cfg.max_iter) {
      throw BracketError("bracket_above: function does not increase away from 0");
    }
    m /= cfg.bracket_growth;
    fm = detail::checked_eval(f, m);
  }
  double b = m * cfg.bracket_growth;
  double fb = detail::checked_eval(f, b);
  while (!(fb < fm)) {
    if (++it > cfg.max_iter) {
      throw BracketError("bracket_above: no decrease found up to x = " + std::to_string(b));
    }
    a = m;
    fa = fm;
    m = b;
    fm = fb;
    b *= cfg.bracket_growth;
    fb = detail::checked_eval(f, b);
  }
  return {a, b};
}

/// Maximizer of a function that rises from 0 then falls, over [0, inf).
template <class F>
Maximum maximize_on_half_line(F&& f, const SearchConfig& cfg = {}) {
  const Bracket br = bracket_above(f, cfg);
  return maximize_unimodal(f, br.lo, br.hi, cfg);
}

template <class F>
double bisect_root(F&& f, double lo, double hi, const SearchConfig& cfg = {});

/// Like maximize_on_half_line, but the maximizer is located by bisection on
/// `rising`, a function positive where f increases and negative where it
/// decreases. Golden section alone only locates x to about sqrt(eps).
template <class F, class G>
Maximum maximize_by_slope_sign(F&& f, G&& rising, const SearchConfig& cfg = {}) {
  const Bracket br = bracket_above(f, cfg);
  const double x = bisect_root(rising, br.lo, br.hi, cfg);
  return {x, f(x)};
}

/// Bisection root of a continuous f with f(lo) f(hi) <= 0.
template <class F>
double bisect_root(F&& f, double lo, double hi, const SearchConfig& cfg) {
  cfg.validate();
  double flo = detail::checked_eval(f, lo);
  double fhi = detail::checked_eval(f, hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw PreconditionError("bisect_root: f(lo) and f(hi) have the same sign");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < cfg.max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = detail::checked_eval(f, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

/// Residual norm below which a Newton iterate is reported as a root.
inline constexpr double kStationaryAcceptNorm = 1e-8;
/// Roots closer than this in the max-norm are the same root.
inline constexpr double kRootDedupRadius = 1e-6;

/// Damped Newton from each seed on a residual R^2 -> R^2 with a forward
/// finite-difference Jacobian. A residual that returns non-finite values
/// marks points outside its domain; steps into them are backtracked.
/// Seeds that do not converge are dropped. Returns deduplicated roots.
template <class R>
std::vector<Point2> solve_stationary_2d(R&& residual, std::span<const Point2> seeds,
                                        const SearchConfig& cfg = {}) {
  cfg.validate();
  const double fd_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  std::vector<Point2> roots;

  for (const Point2& seed : seeds) {
    Point2 x = seed;
    Point2 r = residual(x);
    if (!detail::finite(r)) continue;
    double rn = detail::norm_inf(r);

    for (int it = 0; it < cfg.max_iter && rn > 1e-14; ++it) {
      std::array<Point2, 2> jac{};  // jac[j] is column j
      bool ok = true;
      for (int j = 0; j < 2 && ok; ++j) {
        const double h = fd_eps * std::max(1.0, std::abs(x[j]));
        Point2 xp = x;
        xp[j] += h;
        Point2 rp = residual(xp);
        if (detail::finite(rp)) {
          jac[j] = {(rp[0] - r[0]) / h, (rp[1] - r[1]) / h};
          continue;
        }
        xp[j] = x[j] - h;
        rp = residual(xp);
        if (!detail::finite(rp)) {
          ok = false;
          break;
        }
        jac[j] = {(r[0] - rp[0]) / h, (r[1] - rp[1]) / h};
      }
      if (!ok) break;

      const double det = jac[0][0] * jac[1][1] - jac[1][0] * jac[0][1];
      if (!std::isfinite(det) || det == 0.0) break;
      const Point2 dx = {(-r[0] * jac[1][1] + r[1] * jac[1][0]) / det,
                         (-r[1] * jac[0][0] + r[0] * jac[0][1]) / det};

      bool accepted = false;
      for (double t = 1.0; t > 1e-12; t *= 0.5) {
        const Point2 xn = {x[0] + t * dx[0], x[1] + t * dx[1]};
        const Point2 rn_vec = residual(xn);
        if (!detail::finite(rn_vec)) continue;
        const double n = detail::norm_inf(rn_vec);
        if (n < (1.0 - 1e-4 * t) * rn) {
          x = xn;
          r = rn_vec;
          rn = n;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }

    if (rn > kStationaryAcceptNorm) continue;
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const Point2& p) {
      return std::max(std::abs(p[0] - x[0]), std::abs(p[1] - x[1])) <= kRootDedupRadius;
    });
    if (!duplicate) roots.push_back(x);
  }
  return roots;
}

}  // namespace relaypower
