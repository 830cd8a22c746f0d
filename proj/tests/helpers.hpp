#pragma once

#include <doctest.h>

#include <cmath>

#include "kneadlab/families.hpp"
#include "kneadlab/solver.hpp"

namespace kneadlab::testing {

inline double fd_dx(const Family& f, const Params& p, double x, double h) {
    return (f.eval(p, at(x + h)) - f.eval(p, at(x - h))) / (2.0 * h);
}

inline double fd_dparam(const Family& f, const Params& p, double x, int k,
                        double h) {
    Params pp = p, pm = p;
    pp[k] += h;
    pm[k] -= h;
    return (f.eval(pp, at(x)) - f.eval(pm, at(x))) / (2.0 * h);
}

/// Closure residual f_c^q(0) for the quadratic family, written directly so
/// the solver is checked against an independent iteration.
inline double quad_orbit(double c, int q) {
    double x = 0.0;
    for (int i = 0; i < q; ++i) x = x * x + c;
    return x;
}

/// Central difference of c -> f_c^q(0) with a step adapted to the orbit
/// multiplier, for the parameter-derivative identity.
inline double quad_param_derivative_fd(double c, int q, double multiplier) {
    double h = std::cbrt(2.2e-16) / std::pow(std::max(multiplier, 1.0), 2.0 / 3.0);
    h = std::max(h, 1e-11);
    return (quad_orbit(c + h, q) - quad_orbit(c - h, q)) / (2.0 * h);
}

inline std::vector<Complex> unit_disk_samples(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Complex> out;
    for (int i = 0; i < n; ++i) {
        double r = rng.uniform(), th = rng.uniform(0.0, 6.283185307179586);
        out.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    return out;
}

}  // namespace kneadlab::testing
