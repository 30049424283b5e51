#pragma once

#include "ftecdi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ftecdi::detail {

struct RootOptions {
    double residual_tol = 1e-12; // accepted |f| at the root
    int max_iter = 100;
};

struct ScalarRoot {
    double x;
    double residual;
    int iterations;
};

/// Safeguarded Newton on a bracket [lo, hi] holding a sign change of f.
/// `fdf(x)` returns {f(x), f'(x)}. A Newton step is replaced by bisection
/// when it leaves the bracket or does not shrink fast enough. Iteration runs
/// until the step reaches rounding level, then |f| is checked against
/// residual_tol.
template <class Fdf>
ScalarRoot safeguarded_newton(Fdf&& fdf, double lo, double hi, double x0,
                              const RootOptions& opts, const char* what)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const auto [flo, dlo] = fdf(lo);
    (void)dlo;
    if (flo == 0.0) {
        return {lo, 0.0, 0};
    }
    const bool increasing = flo < 0.0;

    double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
    double dx_old = hi - lo;
    double dx = dx_old;
    double best_x = x;
    double best_f = std::numeric_limits<double>::infinity();
    int used = 0;

    for (int it = 1; it <= opts.max_iter; ++it) {
        used = it;
        const auto [f, df] = fdf(x);
        if (!std::isfinite(f)) {
            throw SolverError(std::string(what) + ": non-finite residual", f);
        }
        if (std::abs(f) < best_f) {
            best_f = std::abs(f);
            best_x = x;
        }
        if (f == 0.0) {
            return {x, 0.0, it};
        }
        if ((f < 0.0) == increasing) {
            lo = x;
        } else {
            hi = x;
        }

        const bool outside = ((x - hi) * df - f) * ((x - lo) * df - f) > 0.0;
        const bool slow = std::abs(2.0 * f) > std::abs(dx_old * df);
        dx_old = dx;
        if (outside || slow || !std::isfinite(df) || df == 0.0) {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = f / df;
            x -= dx;
        }
        if (std::abs(dx) <= 2.0 * eps * std::abs(x) || hi - lo <= 2.0 * eps * std::abs(x)) {
            const auto [fx, dfx] = fdf(x);
            (void)dfx;
            if (std::abs(fx) < best_f) {
                best_f = std::abs(fx);
                best_x = x;
            }
            break;
        }
    }
    if (best_f > opts.residual_tol) {
        throw SolverError(std::string(what) + ": no convergence within iteration cap", best_f);
    }
    return {best_x, best_f, used};
}

} // namespace ftecdi::detail
