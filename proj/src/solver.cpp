#include "kneadlab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "kneadlab/rootfind.hpp"

namespace kneadlab {

namespace {

double mod1(double x) { return x - std::floor(x); }

double circle_dist(double a, double b) {
    double d = mod1(a - b);
    return std::min(d, 1.0 - d);
}

double key_dist(bool circle, double a, double b) {
    return circle ? circle_dist(a, b) : std::abs(a - b);
}

/// Superstable closure residual f_c^q(crit) - crit for one-parameter kinds.
double closure_residual(const Family& family, double param, int q) {
    auto crit = family.critical_data({param});
    require(crit.size() == 1, ErrorCode::Unsupported,
            "superstable solving needs a single marked point");
    SidedPoint p = crit[0].point;
    double target = p.x;
    double x = p.x;
    for (int i = 0; i < q; ++i) {
        x = family.eval({param}, i == 0 ? p : at(x));
        if (!std::isfinite(x) || std::abs(x) > 1e100)
            return std::copysign(1e100, x);
    }
    return x - target;
}

bool minimal_period_is(const Family& family, double param, int q,
                       double margin = 1e-6) {
    for (int p = 1; p < q; ++p) {
        if (q % p != 0) continue;
        if (std::abs(closure_residual(family, param, p)) <= margin)
            return false;
    }
    return true;
}

std::vector<double> scan_roots(const Family& family, int q, double lo,
                               double hi, int subdivisions) {
    std::vector<double> roots;
    double prev_x = lo, prev_f = closure_residual(family, lo, q);
    for (int i = 1; i <= subdivisions; ++i) {
        double x = lo + (hi - lo) * double(i) / subdivisions;
        double f = closure_residual(family, x, q);
        if (prev_f == 0.0 || (prev_f < 0) != (f < 0)) {
            auto res = brent([&](double c) { return closure_residual(family, c, q); },
                             prev_x, x, prev_f, f, 0.0, 1e-13);
            if (roots.empty() || std::abs(res.x - roots.back()) > 1e-9)
                roots.push_back(res.x);
        }
        prev_x = x;
        prev_f = f;
    }
    return roots;
}

}  // namespace

SolveResult solve_superstable(const Family& family, int q, double lo,
                              double hi, int subdivisions) {
    require(q >= 1 && q <= 64, ErrorCode::InvalidArgument,
            "period must be in [1, 64]");
    auto roots = scan_roots(family, q, lo, hi, subdivisions);
    require(!roots.empty(), ErrorCode::NoRoot,
            "no sign change of the closure residual on the bracket");
    for (double c : roots) {
        if (minimal_period_is(family, c, q))
            return {c, closure_residual(family, c, q), 0};
    }
    fail(ErrorCode::PeriodCollision,
         "every root on the bracket has a smaller minimal period");
}

std::vector<std::pair<double, int>> superstable_scan(const Family& family,
                                                     int q_max, double lo,
                                                     double hi,
                                                     int subdivisions) {
    std::vector<std::pair<double, int>> out;
    for (int q = 1; q <= q_max; ++q) {
        for (double c : scan_roots(family, q, lo, hi, subdivisions)) {
            if (minimal_period_is(family, c, q)) out.emplace_back(c, q);
        }
    }
    return out;
}

SolveResult solve_word(const Family& family, const KneadingSequence& word,
                       double lo, double hi, double delta_hit) {
    require(!word.symbols.empty() && word.symbols.back() == 0,
            ErrorCode::InvalidArgument, "target word must end in 0");
    int q = word.length();
    auto word_at = [&](double c) {
        return kneading(family, {c}, q, delta_hit);
    };
    MTOrder order_lo = mt_compare(word_at(lo), word);
    MTOrder order_hi = mt_compare(word_at(hi), word);
    if (order_lo == MTOrder::Equal) return {lo, closure_residual(family, lo, q), 0};
    if (order_hi == MTOrder::Equal) return {hi, closure_residual(family, hi, q), 0};
    require(order_lo != MTOrder::Greater || order_hi != MTOrder::Less,
            ErrorCode::MonotonicityViolation,
            "bracket endpoints are ordered against the MT order");
    require(order_lo == MTOrder::Less && order_hi == MTOrder::Greater,
            ErrorCode::NotRealized, "word is not bracketed by the endpoints");

    int iterations = 0;
    while (hi - lo > 1e-11 * (1.0 + std::abs(lo))) {
        ++iterations;
        double mid = 0.5 * (lo + hi);
        MTOrder cmp = mt_compare(word_at(mid), word);
        if (cmp == MTOrder::Equal) {
            lo = hi = mid;
            break;
        }
        if (cmp == MTOrder::Less)
            lo = mid;
        else if (cmp == MTOrder::Greater)
            hi = mid;
        else
            fail(ErrorCode::MonotonicityViolation,
                 "undecidable comparison inside the bracket");
    }

    // Polish on the closure residual: expand until a sign change brackets
    // the superstable parameter, then run the safeguarded root finder.
    double c_star = 0.5 * (lo + hi);
    double span = std::max(1e-9, 4.0 * (hi - lo)) * 0.5;
    for (int grow = 0; grow < 24; ++grow, span *= 2.0) {
        double a = c_star - span, b = c_star + span;
        double fa = closure_residual(family, a, q);
        double fb = closure_residual(family, b, q);
        if ((fa < 0) != (fb < 0)) {
            auto res = brent(
                [&](double c) { return closure_residual(family, c, q); }, a, b,
                fa, fb, 0.0, 1e-13);
            auto got = word_at(res.x);
            require(got.symbols == word.symbols, ErrorCode::NotRealized,
                    "bisection converged to a parameter with word " + got.str());
            return {res.x, res.residual, iterations + res.iterations};
        }
    }
    fail(ErrorCode::NotRealized, "no superstable closure near the word limit");
}

namespace {

std::vector<double> residual_2d(const Family& family,
                                const std::vector<Relation>& rels,
                                const Params& params) {
    auto crit = family.critical_data(params);
    bool circle = family.circle();
    std::vector<double> out;
    out.reserve(rels.size());
    for (const auto& rel : rels) {
        require(rel.marked_index >= 0 && rel.marked_index < int(crit.size()),
                ErrorCode::InvalidArgument, "relation index out of range");
        SidedPoint p = crit[rel.marked_index].point;
        double target = p.x;
        double x = p.x;
        for (int i = 0; i < rel.period; ++i)
            x = family.eval_raw(params, i == 0 ? p : at(x));
        double r = x - target;
        if (circle) r -= std::round(r);
        out.push_back(r);
    }
    return out;
}

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> try_residual(const Family& family,
                                 const std::vector<Relation>& rels,
                                 const Params& params) {
    try {
        return residual_2d(family, rels, params);
    } catch (const Error&) {
        return std::vector<double>(rels.size(), 1e100);
    }
}

}  // namespace

Solve2DResult solve_two_param(const Family& family,
                              const std::vector<Relation>& relations,
                              Params initial) {
    require(family.param_dim() == 2, ErrorCode::WrongShape,
            "two-parameter solving needs a two-parameter family");
    require(relations.size() == 2, ErrorCode::InvalidArgument,
            "need exactly two relations");
    Params p = std::move(initial);
    std::vector<double> r = residual_2d(family, relations, p);

    for (int it = 1; it <= 200; ++it) {
        if (norm_inf(r) <= 1e-10) {
            if (!family.circle()) {
                for (const auto& rel : relations) {
                    if (!rel.word) continue;
                    auto want = KneadingSequence::parse(*rel.word);
                    auto got = itinerary(
                        family, p,
                        family.critical_data(p)[rel.marked_index].point,
                        want.length());
                    require(got.symbols == want.symbols, ErrorCode::NotRealized,
                            "solution has itinerary " + got.str());
                }
            }
            return {p, norm_inf(r), it - 1};
        }
        // Central-difference Jacobian.
        double J[2][2];
        for (int k = 0; k < 2; ++k) {
            double h = 1e-6 * (1.0 + std::abs(p[k]));
            Params pp = p, pm = p;
            pp[k] += h;
            pm[k] -= h;
            auto rp = try_residual(family, relations, pp);
            auto rm = try_residual(family, relations, pm);
            for (int i = 0; i < 2; ++i) J[i][k] = (rp[i] - rm[i]) / (2.0 * h);
        }
        double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        double fro2 = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) fro2 += J[i][k] * J[i][k];
        // 2x2 condition number from the singular values.
        double tr = fro2, dd = std::abs(det);
        double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * dd * dd));
        double smax2 = 0.5 * (tr + disc), smin2 = 0.5 * (tr - disc);
        require(smin2 > 0 && std::sqrt(smax2 / smin2) < 1e12,
                ErrorCode::SingularJacobian,
                "closure Jacobian is numerically singular");
        double dx0 = (r[0] * J[1][1] - r[1] * J[0][1]) / det;
        double dx1 = (r[1] * J[0][0] - r[0] * J[1][0]) / det;

        double lambda = 1.0;
        bool accepted = false;
        for (int halve = 0; halve < 60; ++halve, lambda *= 0.5) {
            Params trial = {p[0] - lambda * dx0, p[1] - lambda * dx1};
            auto rt = try_residual(family, relations, trial);
            if (norm_inf(rt) < norm_inf(r)) {
                p = trial;
                r = rt;
                accepted = true;
                break;
            }
        }
        require(accepted, ErrorCode::Diverged,
                "damped Newton step failed to reduce the residual");
    }
    fail(ErrorCode::Diverged, "Newton did not converge in 200 steps");
}

Params coarse_seed_2d(const Family& family,
                      const std::vector<Relation>& relations, Params lo,
                      Params hi, int n) {
    double best = std::numeric_limits<double>::infinity();
    Params best_p = lo;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Params p = {lo[0] + (hi[0] - lo[0]) * (i + 0.5) / n,
                        lo[1] + (hi[1] - lo[1]) * (j + 0.5) / n};
            double v = norm_inf(try_residual(family, relations, p));
            if (v < best) {
                best = v;
                best_p = p;
            }
        }
    }
    return best_p;
}

MarkedOrbit marked_orbit(const Family& family, const Params& params,
                         std::optional<double> tol_opt) {
    double tol = tol_opt.value_or(family.default_closure_tol());
    auto crit = family.critical_data(params);
    int nu = int(crit.size());
    bool circle = family.circle();

    std::vector<double> marked_key(nu);
    for (int m = 0; m < nu; ++m)
        marked_key[m] = circle ? mod1(crit[m].point.x) : crit[m].point.x;

    struct RawOrbit {
        std::vector<OrbitPoint> pts;
        CriticalRelation rel;
        int native = 0;
    };
    std::vector<RawOrbit> raw(nu);

    for (int m = 0; m < nu; ++m) {
        RawOrbit& ro = raw[m];
        ro.native = m;
        OrbitPoint p0;
        p0.x = crit[m].point.x;
        p0.key = marked_key[m];
        p0.side = crit[m].point.side;
        p0.branch = family.branch_at(params, crit[m].point);
        p0.dg = std::numeric_limits<double>::quiet_NaN();
        ro.pts.push_back(p0);

        double x = family.eval_raw(params, crit[m].point);
        bool closed = false;
        for (int i = 1; i <= 4096 && !closed; ++i) {
            OrbitPoint pt;
            pt.x = x;
            pt.key = circle ? mod1(x) : x;

            // First kind: the orbit lands on a marked point.
            for (int mm = 0; mm < nu; ++mm) {
                if (key_dist(circle, pt.key, marked_key[mm]) <= tol) {
                    pt.side = Side::TwoSided;
                    pt.branch = 0;
                    pt.dg = std::numeric_limits<double>::quiet_NaN();
                    ro.pts.push_back(pt);
                    ro.rel.first_kind = true;
                    ro.rel.q = i;
                    ro.rel.mu = mm;  // native index for now
                    ro.rel.wrap =
                        circle ? std::round(pt.x - crit[mm].point.x) : 0.0;
                    closed = true;
                    break;
                }
            }
            if (closed) break;

            // Second kind: the orbit revisits one of its own points.
            for (int l = 1; l < int(ro.pts.size()); ++l) {
                if (key_dist(circle, pt.key, ro.pts[l].key) <= tol) {
                    pt.side = Side::TwoSided;
                    pt.branch = ro.pts[l].branch;
                    pt.dg = ro.pts[l].dg;
                    ro.pts.push_back(pt);
                    ro.rel.first_kind = false;
                    ro.rel.q = i;
                    ro.rel.l = l;
                    ro.rel.wrap = circle ? std::round(pt.x - ro.pts[l].x) : 0.0;
                    closed = true;
                    break;
                }
            }
            if (closed) break;

            SidedPoint sp = at(circle ? pt.key : pt.x);
            pt.side = Side::TwoSided;
            pt.branch = family.branch_at(params, sp);
            pt.dg = family.d_dx(params, sp);
            require(std::abs(pt.dg) >= tol, ErrorCode::TangentOrbit,
                    "orbit derivative vanished at an interior point");
            ro.pts.push_back(pt);
            x = family.eval_raw(params, at(pt.x));
            require(std::isfinite(x), ErrorCode::OrbitNotFinite,
                    "orbit diverged");
        }
        require(closed, ErrorCode::OrbitNotFinite,
                "critical orbit did not close within 4096 steps");
    }

    // Sort first-kind orbits in front (stable in the native order) and remap
    // the mu references to sorted positions.
    std::vector<int> order(nu);
    for (int m = 0; m < nu; ++m) order[m] = m;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return raw[a].rel.first_kind && !raw[b].rel.first_kind;
    });
    std::vector<int> sorted_pos(nu);
    for (int j = 0; j < nu; ++j) sorted_pos[order[j]] = j;

    MarkedOrbit orbit;
    orbit.nu = nu;
    orbit.tol = tol;
    orbit.circle = circle;
    for (int j = 0; j < nu; ++j) {
        RawOrbit& ro = raw[order[j]];
        if (ro.rel.first_kind) {
            ++orbit.r;
            ro.rel.mu = sorted_pos[ro.rel.mu];
        }
        orbit.pts.push_back(std::move(ro.pts));
        orbit.rel.push_back(ro.rel);
        orbit.label.push_back(ro.native);
    }
    return orbit;
}

}  // namespace kneadlab
