#pragma once

#include <cmath>
#include <functional>

#include "kneadlab/common.hpp"

namespace kneadlab {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Bracketed root finder: bisection safeguarded with secant acceleration.
/// The bracket is guaranteed to shrink; convergence is superlinear on smooth
/// residuals. `fa` and `fb` must have opposite signs.
template <class F>
RootResult brent(F&& f, double a, double b, double fa, double fb,
                 double xtol = 0.0, double ftol = 1e-12, int max_iter = 200) {
    require(std::isfinite(fa) && std::isfinite(fb), ErrorCode::NoRoot,
            "non-finite residual at bracket endpoint");
    require(fa == 0.0 || fb == 0.0 || (fa < 0) != (fb < 0), ErrorCode::NoRoot,
            "root finder requires a sign change");
    if (fa == 0.0) return {a, 0.0, 0};
    if (fb == 0.0) return {b, 0.0, 0};

    double best_x = std::abs(fa) < std::abs(fb) ? a : b;
    double best_f = std::abs(fa) < std::abs(fb) ? fa : fb;
    int it = 0;
    while (it < max_iter) {
        ++it;
        // Secant proposal, clipped into the open bracket; fall back to
        // bisection when it lands outside or makes no progress.
        double mid = 0.5 * (a + b);
        double x = mid;
        if (fb != fa) {
            double s = b - fb * (b - a) / (fb - fa);
            double lo = std::min(a, b), hi = std::max(a, b);
            double margin = 0.01 * (hi - lo);
            if (s > lo + margin && s < hi - margin) x = s;
        }
        double fx = f(x);
        if (std::abs(fx) < std::abs(best_f)) {
            best_x = x;
            best_f = fx;
        }
        if (std::abs(fx) <= ftol || fx == 0.0) return {x, fx, it};
        if ((fx < 0) == (fa < 0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (std::abs(b - a) <= xtol + 4.0 * std::abs(mid) * 1e-17)
            return {best_x, best_f, it};
    }
    return {best_x, best_f, it};
}

template <class F>
RootResult brent(F&& f, double a, double b, double xtol = 0.0,
                 double ftol = 1e-12, int max_iter = 200) {
    return brent(f, a, b, f(a), f(b), xtol, ftol, max_iter);
}

/// Plain bisection to near machine precision. Requires a sign change.
template <class F>
double bisect(F&& f, double a, double b, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    require(fa == 0.0 || fb == 0.0 || (fa < 0) != (fb < 0),
            ErrorCode::NoRootInBracket, "bisect requires a sign change");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    for (int i = 0; i < max_iter; ++i) {
        double m = 0.5 * (a + b);
        if (m == a || m == b) return m;
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace kneadlab
