#include "kneadlab/motionlab.hpp"

#include <algorithm>
#include <cmath>

#include "kneadlab/rootfind.hpp"

namespace kneadlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

int MotionGrid::find_point(double x, double tol) const {
    for (int p = 0; p < points(); ++p)
        if (std::abs(base[p] - x) <= tol) return p;
    return -1;
}

double MotionGrid::sup_distance_to_identity() const {
    double d = 0.0;
    for (int p = 0; p < points(); ++p)
        for (int m = 0; m < rays(); ++m)
            for (int k = 0; k < nradii(); ++k)
                d = std::max(d, std::abs(values[p][m][k] - base[p]));
    return d;
}

CVec MotionGrid::derivative_at_zero() const {
    // 4-point Cauchy integral on the smallest circle; aliasing error is
    // O(r^4). Falls back to all rays when 4 does not divide the ray count.
    CVec out(points());
    double r = radii.front();
    int n = rays();
    int step = (n % 4 == 0) ? n / 4 : 1;
    int used = (n % 4 == 0) ? 4 : n;
    for (int p = 0; p < points(); ++p) {
        Complex sum = 0.0;
        for (int m = 0; m < n; m += step) {
            Complex e(std::cos(angles[m]), std::sin(angles[m]));
            sum += values[p][m][0] / e;
        }
        out[p] = sum / (double(used) * r);
    }
    return out;
}

namespace {

MotionGrid empty_grid(const std::vector<double>& points,
                      const GridSpec& spec) {
    require(spec.rays >= 4 && spec.radii >= 1 && spec.r_max > 0,
            ErrorCode::InvalidArgument, "bad motion grid spec");
    MotionGrid g;
    g.base = points;
    g.radii.resize(spec.radii);
    for (int k = 0; k < spec.radii; ++k)
        g.radii[k] = spec.r_max * double(k + 1) / double(spec.radii);
    g.angles.resize(spec.rays);
    for (int m = 0; m < spec.rays; ++m)
        g.angles[m] = 2.0 * kPi * double(m) / double(spec.rays);
    g.values.assign(points.size(),
                    std::vector<std::vector<Complex>>(
                        spec.rays, std::vector<Complex>(spec.radii)));
    return g;
}

void check_injective(const MotionGrid& g) {
    for (int m = 0; m < g.rays(); ++m) {
        for (int k = 0; k < g.nradii(); ++k) {
            for (int p = 0; p < g.points(); ++p) {
                for (int q = p + 1; q < g.points(); ++q) {
                    require(std::abs(g.values[p][m][k] - g.values[q][m][k]) >
                                1e-13,
                            ErrorCode::InjectivityLost,
                            "motion values collided");
                }
            }
        }
    }
}

}  // namespace

MotionGrid first_order_motion(const std::vector<double>& points, const CVec& v,
                              const GridSpec& spec) {
    require(v.size() == points.size(), ErrorCode::InvalidArgument,
            "one direction per point required");
    MotionGrid g = empty_grid(points, spec);
    for (int p = 0; p < g.points(); ++p)
        for (int m = 0; m < g.rays(); ++m)
            for (int k = 0; k < g.nradii(); ++k)
                g.values[p][m][k] = points[p] + g.lambda(m, k) * v[p];
    check_injective(g);
    return g;
}

MotionGrid random_motion(const std::vector<double>& points, double sigma,
                         std::uint64_t seed, const GridSpec& spec,
                         bool real_mode) {
    Rng rng(seed);
    CVec v(points.size());
    for (auto& vi : v) {
        double re = rng.uniform(-sigma, sigma);
        double im = real_mode ? 0.0 : rng.uniform(-sigma, sigma);
        vi = Complex(re, im);
    }
    MotionGrid g = first_order_motion(points, v, spec);
    g.real_mode = real_mode;
    return g;
}

std::vector<GPPoint> g_of_P(const MarkedOrbit& orbit) {
    std::vector<GPPoint> pts;
    auto dist = [&](double a, double b) {
        double d = std::abs(a - b);
        return orbit.circle ? std::min(d, 1.0 - d) : d;
    };
    auto find = [&](double key) {
        for (size_t n = 0; n < pts.size(); ++n)
            if (dist(pts[n].key, key) <= orbit.tol) return int(n);
        return -1;
    };
    for (int j = 0; j < orbit.r; ++j) {
        int m = orbit.mu(j);
        double key = orbit.pts[m][0].key;
        int s = find(key);
        if (s < 0) {
            pts.push_back({key, m, -1, -1});
        } else if (pts[s].marked < 0 || m < pts[s].marked) {
            require(pts[s].i < 0, ErrorCode::CollidingOrbitPoints,
                    "marked point collides with an orbit point");
            pts[s].marked = m;
        }
    }
    for (int j = 0; j < orbit.nu; ++j) {
        for (int i = 1; i <= orbit.q(j) - 1; ++i) {
            double key = orbit.pts[j][i].key;
            int s = find(key);
            require(s < 0, ErrorCode::CollidingOrbitPoints,
                    "orbit points collide; the point operator is undefined");
            pts.push_back({key, -1, i, j});
        }
    }
    return pts;
}

MotionGrid make_motion(const MarkedOrbit& orbit, double sigma,
                       std::uint64_t seed, const GridSpec& spec,
                       bool real_mode) {
    auto pts = g_of_P(orbit);
    std::vector<double> base;
    for (const auto& p : pts) base.push_back(p.key);
    return random_motion(base, sigma, seed, spec, real_mode);
}

MotionGrid lift_motion(const MotionGrid& motion, const MarkedOrbit& orbit,
                       const Deformation& def) {
    auto pts = g_of_P(orbit);
    require(int(pts.size()) == motion.points(), ErrorCode::WrongShape,
            "motion does not sample g(P)");
    for (size_t p = 0; p < pts.size(); ++p)
        require(std::abs(pts[p].key - motion.base[p]) <= orbit.tol,
                ErrorCode::WrongShape, "motion base points do not match g(P)");

    // Index of the point carrying the motion of c_{1,k}, per sorted k.
    std::vector<int> c1_index(orbit.nu);
    // Index of h(g(x)) for each regular point, and the marked point hit.
    std::vector<int> next_index(pts.size(), -1);
    std::vector<double> next_offset(pts.size(), 0.0);
    auto find_key = [&](double key) {
        for (size_t n = 0; n < pts.size(); ++n) {
            double d = std::abs(pts[n].key - key);
            if (orbit.circle) d = std::min(d, 1.0 - d);
            if (d <= orbit.tol) return int(n);
        }
        fail(ErrorCode::WrongShape, "forward image missing from g(P)");
    };
    for (int k = 0; k < orbit.nu; ++k)
        c1_index[k] = find_key(orbit.pts[k][1].key);
    const CVec& base_native = def.base_w();
    for (size_t p = 0; p < pts.size(); ++p) {
        if (pts[p].marked >= 0) continue;
        int i = pts[p].i, j = pts[p].j;
        next_index[p] = find_key(orbit.pts[j][i + 1].key);
        // Integer offset between the unreduced image of the representative
        // and the stored representative (nonzero only on the circle).
        Complex gx = def.G(base_native, Complex(pts[p].key, 0.0),
                           orbit.pts[j][i].branch);
        next_offset[p] =
            std::round(gx.real() - pts[next_index[p]].key);
    }

    MotionGrid out = motion;
    for (int m = 0; m < motion.rays(); ++m) {
        // March outward along the ray; the previous radius seeds Newton.
        CVec prev_h(pts.size());
        for (size_t p = 0; p < pts.size(); ++p)
            prev_h[p] = Complex(motion.base[p], 0.0);
        CVec prev_w_native = base_native;
        std::vector<double> prev_step(pts.size(), 0.0);
        CVec lifted = prev_h;

        for (int k = 0; k < motion.nradii(); ++k) {
            CVec cur_h(pts.size());
            for (size_t p = 0; p < pts.size(); ++p)
                cur_h[p] = motion.values[p][m][k];
            CVec w_native(orbit.nu);
            for (int j = 0; j < orbit.nu; ++j)
                w_native[orbit.label[j]] = cur_h[c1_index[j]];

            double input_step = 0.0;
            for (size_t p = 0; p < pts.size(); ++p)
                input_step =
                    std::max(input_step, std::abs(cur_h[p] - prev_h[p]));

            // Continuation from the previous radius. The target path between
            // grid radii is refined when Newton jumps off the tracked branch.
            int substeps = 1;
            for (int attempt = 0;; ++attempt) {
                require(attempt <= 10, ErrorCode::BranchJump,
                        "branch tracking failed after 10 refinements");
                bool ok = true;
                CVec z = lifted;
                for (int s = 1; s <= substeps && ok; ++s) {
                    double frac = double(s) / substeps;
                    CVec w_s(orbit.nu);
                    for (int j = 0; j < orbit.nu; ++j) {
                        Complex a = prev_w_native[orbit.label[j]];
                        Complex b = w_native[orbit.label[j]];
                        w_s[orbit.label[j]] = a + frac * (b - a);
                    }
                    for (size_t p = 0; p < pts.size(); ++p) {
                        if (pts[p].marked >= 0) {
                            z[p] = def.p(w_s, orbit.label[pts[p].marked]);
                            continue;
                        }
                        Complex target = prev_h[next_index[p]] +
                                         frac * (cur_h[next_index[p]] -
                                                 prev_h[next_index[p]]) +
                                         next_offset[p];
                        int branch = orbit.pts[pts[p].j][pts[p].i].branch;
                        Complex zn;
                        try {
                            zn = def.invert(w_s, target, branch, z[p]);
                        } catch (const Error& e) {
                            if (e.code() != ErrorCode::SingularLift) throw;
                            for (int j = 0; j < orbit.nu; ++j)
                                require(std::abs(target - w_s[j]) > 1e-10,
                                        ErrorCode::TargetHitSingularValue,
                                        "lift target hit a singular value");
                            throw;
                        }
                        double step = std::abs(zn - z[p]);
                        double allowed = (3.0 * prev_step[p] +
                                          10.0 * input_step + 1e-9) /
                                         double(substeps);
                        if (step > allowed && !def.closed_form_inverse()) {
                            ok = false;
                            break;
                        }
                        z[p] = zn;
                    }
                }
                if (ok) {
                    lifted = z;
                    break;
                }
                substeps *= 2;
            }

            for (size_t p = 0; p < pts.size(); ++p) {
                out.values[p][m][k] = lifted[p];
                prev_step[p] = std::abs(lifted[p] - prev_h[p]);
            }
            prev_h = cur_h;
            prev_w_native = w_native;
        }
    }
    check_injective(out);
    return out;
}

LiftDecay iterate_lifts(const MotionGrid& motion, const MarkedOrbit& orbit,
                        const Deformation& def, int k) {
    require(k >= 2 && k <= 200, ErrorCode::InvalidArgument,
            "iteration count must be in [2, 200]");
    LiftDecay out;
    MotionGrid cur = motion;
    int doubling_streak = 0;
    for (int it = 1; it <= k; ++it) {
        cur = lift_motion(cur, orbit, def);
        double d = cur.sup_distance_to_identity();
        if (!out.sup_distances.empty() && d > 2.0 * out.sup_distances.back())
            ++doubling_streak;
        else
            doubling_streak = 0;
        require(doubling_streak < 5, ErrorCode::Diverged,
                "sup-distance doubled five times in a row");
        out.sup_distances.push_back(d);
    }
    // Log-linear least squares on the tail.
    int tail = k / 2;
    int lo = k - tail;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = lo; i < k; ++i) {
        if (out.sup_distances[i] <= 0) continue;
        double x = double(i + 1), y = std::log(out.sup_distances[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    require(n >= 2, ErrorCode::InvalidArgument,
            "not enough positive distances to fit a rate");
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.rate = std::exp(slope);
    return out;
}

double estimate_r_max(const MarkedOrbit& orbit, const Deformation& def,
                      double sigma, std::uint64_t seed) {
    double r = 1.0;
    for (int it = 0; it < 20; ++it, r *= 0.5) {
        try {
            GridSpec spec{8, 6, r};
            MotionGrid m = make_motion(orbit, sigma, seed, spec, false);
            lift_motion(m, orbit, def);
            return 0.3 * r;
        } catch (const Error&) {
            continue;
        }
    }
    fail(ErrorCode::SingularLift, "no radius admitted a single lift");
}

// --- Sector geometry --------------------------------------------------------

double angle_0z1(Complex z) {
    Complex u = -z, v = 1.0 - z;
    double d = std::abs(u) * std::abs(v);
    require(d > 0, ErrorCode::InvalidArgument, "angle undefined at 0 or 1");
    double c = (u.real() * v.real() + u.imag() * v.imag()) / d;
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

bool in_sector(Complex z, double theta) {
    return std::abs(z) > 0 && std::abs(std::arg(z)) < theta;
}

RegularityReport theta_regular_check(const MotionGrid& motion,
                                     const SectorParams& sector) {
    RegularityReport rep;
    double half = 4.0 * sector.theta / sector.ell;
    rep.sector_margin = half;
    rep.angle_margin = sector.theta;

    for (int p = 0; p < motion.points(); ++p) {
        double x = motion.base[p];
        if (x == 0.0) continue;
        for (int m = 0; m < motion.rays(); ++m) {
            for (int k = 0; k < motion.nradii(); ++k) {
                Complex h = motion.values[p][m][k];
                if (x < 0) h = -h;
                double margin = half - std::abs(std::arg(h));
                if (margin < rep.sector_margin) {
                    rep.sector_margin = margin;
                    if (margin < 0) rep.offender_point = p;
                }
            }
        }
    }
    for (int p = 0; p < motion.points(); ++p) {
        for (int q = 0; q < motion.points(); ++q) {
            double a = motion.base[p], b = motion.base[q];
            if (a * b <= 0 || std::abs(a) <= std::abs(b) || b == 0.0) continue;
            // |a| > |b| > 0, same sign: the ratio h(b)/h(a) must see the
            // segment [0,1] under an angle close to pi.
            for (int m = 0; m < motion.rays(); ++m) {
                for (int k = 0; k < motion.nradii(); ++k) {
                    Complex z =
                        motion.values[q][m][k] / motion.values[p][m][k];
                    double margin = angle_0z1(z) - (kPi - sector.theta);
                    if (margin < rep.angle_margin) {
                        rep.angle_margin = margin;
                        if (margin < 0) rep.offender_point = p;
                    }
                }
            }
        }
    }
    rep.ok = rep.sector_margin >= 0 && rep.angle_margin >= 0;
    return rep;
}

// --- Odd-exponent machinery --------------------------------------------------

OddConstants odd_constants(int ell) {
    require(ell >= 3 && ell % 2 == 1, ErrorCode::InvalidArgument,
            "need an odd ell >= 3");
    OddConstants c;
    double l = ell;
    c.theta = kPi * l * l / (2.0 * (l * l * l - 1.0));
    double alpha = kPi * (l + 1.0) / (2.0 * (l * l * l - 1.0));
    auto f = [&](double R) {
        return std::pow(R, 2.0 * l) - R * R - std::pow(R, 2.0 / l) -
               2.0 * std::pow(R, 1.0 + 1.0 / l) * std::cos(alpha);
    };
    double R = bisect(f, 1.0 + 1e-12, 2.0);
    // One Newton polish for the last digits of the residual.
    for (int it = 0; it < 4; ++it) {
        double h = 1e-7;
        double df = (f(R + h) - f(R - h)) / (2.0 * h);
        R -= f(R) / df;
    }
    c.R = R;
    c.residual = std::abs(f(R));
    c.lemma_margin = 2.0 * R * std::cos(c.theta / (l * l)) -
                     std::pow(2.0, 1.0 / (l - 1.0)) -
                     std::pow(2.0, 1.0 / (l * l - l));
    return c;
}

OddOrbitContext odd_orbit_context(int ell, double c1) {
    OddOrbitContext ctx;
    ctx.ell = ell;
    ctx.c1 = c1;
    ctx.constants = odd_constants(ell);
    require(c1 < 0, ErrorCode::HypothesisViolated, "need c1 < 0");

    auto f = [&](double x) {
        return std::pow(std::abs(x), double(ell)) + c1;
    };
    std::vector<double> orbit{0.0};
    int period = -1;
    double x = 0.0;
    for (int i = 1; i <= 64; ++i) {
        x = f(x);
        if (std::abs(x) <= 1e-8) {
            period = i;
            break;
        }
        orbit.push_back(x);
    }
    require(period >= 2, ErrorCode::HypothesisViolated,
            "critical point is not periodic at this parameter");
    ctx.q = period - 1;
    ctx.z1 = std::abs(orbit.back());

    // Orientation-reversing fixed point -w: w^ell + w + c1 = 0.
    auto g = [&](double w) {
        return std::pow(w, double(ell)) + w + c1;
    };
    ctx.w = bisect(g, 0.0, std::abs(c1) + 1.0);

    require(ctx.w < ctx.z1, ErrorCode::HypothesisViolated,
            "fixed point does not precede the symmetric pair");
    for (int j = 1; j <= ctx.q; ++j)
        require(!(orbit[j] >= -ctx.w - 1e-12 && orbit[j] < 0),
                ErrorCode::HypothesisViolated,
                "orbit enters [-w, 0)");
    require(ctx.q >= 4, ErrorCode::HypothesisViolated,
            "need c2 > c3 > c4 > 0");
    require(orbit[2] > orbit[3] && orbit[3] > orbit[4] && orbit[4] > 0,
            ErrorCode::HypothesisViolated, "need c2 > c3 > c4 > 0");

    ctx.points = orbit;
    ctx.points.push_back(-orbit.back());  // the mirror of f^q(0)
    return ctx;
}

MotionGrid lift_odd_motion(const MotionGrid& motion,
                           const OddOrbitContext& ctx) {
    int n = motion.points();
    require(n == int(ctx.points.size()), ErrorCode::WrongShape,
            "motion does not sample the odd-orbit point set");
    auto f = [&](double x) {
        return std::pow(std::abs(x), double(ctx.ell)) + ctx.c1;
    };
    std::vector<int> next(n);
    int c1_index = motion.find_point(ctx.c1, 1e-7);
    int z1_index = motion.find_point(ctx.z1, 1e-7);
    int mz1_index = motion.find_point(-ctx.z1, 1e-7);
    require(c1_index >= 0 && z1_index >= 0 && mz1_index >= 0,
            ErrorCode::WrongShape, "context points missing from the motion");
    for (int p = 0; p < n; ++p) {
        double x = motion.base[p];
        if (x == 0.0) {
            next[p] = -1;
            continue;
        }
        double fx = std::abs(x) == ctx.z1 ? 0.0 : f(x);
        next[p] = motion.find_point(fx, 1e-7);
        require(next[p] >= 0, ErrorCode::WrongShape,
                "forward image missing from the point set");
    }

    MotionGrid out = motion;
    double inv_ell = 1.0 / double(ctx.ell);
    for (int m = 0; m < motion.rays(); ++m) {
        for (int k = 0; k < motion.nradii(); ++k) {
            Complex hc1 = motion.values[c1_index][m][k];
            for (int p = 0; p < n; ++p) {
                double x = motion.base[p];
                if (x == 0.0) {
                    out.values[p][m][k] = 0.0;
                } else if (x > 0) {
                    Complex d = motion.values[next[p]][m][k] - hc1;
                    out.values[p][m][k] = std::pow(d, inv_ell);
                } else {
                    Complex d = motion.values[next[p]][m][k] - hc1;
                    out.values[p][m][k] = -std::pow(d, inv_ell);
                }
            }
            // Antisymmetry of the pair +-z1 holds by construction: both map
            // to 0, so the two lifted values are exact negatives.
            out.values[mz1_index][m][k] = -out.values[z1_index][m][k];
        }
    }
    return out;
}

MotionGrid odd_random_motion(const OddOrbitContext& ctx, double sigma,
                             std::uint64_t seed, const GridSpec& spec) {
    Rng rng(seed);
    CVec v(ctx.points.size());
    for (auto& vi : v)
        vi = Complex(rng.uniform(-sigma, sigma), rng.uniform(-sigma, sigma));
    int last = int(ctx.points.size()) - 1;  // the mirrored point
    for (size_t p = 0; p + 1 < ctx.points.size(); ++p) {
        if (ctx.points[p] == 0.0) v[p] = 0.0;
        if (ctx.points[p] == -ctx.points[last]) v[last] = -v[p];
    }
    return first_order_motion(ctx.points, v, spec);
}

AdmissibilityReport admissible_check(const MotionGrid& motion,
                                     const OddOrbitContext& ctx) {
    AdmissibilityReport rep;
    for (double& m : rep.margins)
        m = std::numeric_limits<double>::infinity();
    int z1_index = motion.find_point(ctx.z1, 1e-7);
    int mz1_index = motion.find_point(-ctx.z1, 1e-7);
    int zero_index = motion.find_point(0.0, 1e-7);
    int c1_index = motion.find_point(ctx.c1, 1e-7);
    int c2_index = -1;
    {
        double c2 = std::pow(std::abs(ctx.c1), double(ctx.ell)) + ctx.c1;
        c2_index = motion.find_point(c2, 1e-7);
    }
    require(z1_index >= 0 && mz1_index >= 0 && zero_index >= 0 &&
                c1_index >= 0 && c2_index >= 0,
            ErrorCode::WrongShape, "context points missing from the motion");

    double theta = ctx.constants.theta, R = ctx.constants.R;
    double l = ctx.ell;
    double a7_bound = std::pow(2.0, 1.0 / (l - 1.0));
    double a8_bound = std::pow(2.0, 1.0 / (l * l - l));

    for (int m = 0; m < motion.rays(); ++m) {
        for (int k = 0; k < motion.nradii(); ++k) {
            auto val = [&](int p) { return motion.values[p][m][k]; };
            double hz1 = std::abs(val(z1_index));
            double a1_defect = std::abs(val(mz1_index) + val(z1_index)) +
                               std::abs(val(zero_index));
            rep.margins[0] = std::min(rep.margins[0], 1e-12 - a1_defect);
            for (int p = 0; p < motion.points(); ++p) {
                double x = motion.base[p];
                Complex h = val(p);
                if (x > 0 && x < ctx.w)
                    rep.margins[1] = std::min(rep.margins[1], hz1 - std::abs(h));
                if (x > ctx.w)
                    rep.margins[2] = std::min(
                        rep.margins[2], theta - std::abs(std::arg(h)));
                if (x < -ctx.w)
                    rep.margins[3] = std::min(
                        rep.margins[3], theta - std::abs(std::arg(-h)));
                rep.margins[6] =
                    std::min(rep.margins[6], a7_bound - std::abs(h));
            }
            rep.margins[4] = std::min(
                rep.margins[4],
                std::min(theta / (l * l) - std::abs(std::arg(-val(c1_index))),
                         theta / l - std::abs(std::arg(val(c2_index)))));
            rep.margins[5] = std::min(
                rep.margins[5],
                std::min(std::abs(val(c1_index)) - R,
                         std::abs(val(c2_index)) - std::pow(R, 1.0 / l)));
            rep.margins[7] = std::min(rep.margins[7], a8_bound - hz1);
        }
    }
    rep.ok = true;
    for (double m : rep.margins) rep.ok = rep.ok && m >= 0;
    return rep;
}

// --- Separation geometry ------------------------------------------------------

SeparationReport separation_check(const Family& family, const Params& params) {
    SeparationReport rep;
    switch (family.kind()) {
        case Kind::PowerUnimodal:
            rep.ok = true;
            rep.trivial = true;
            rep.detail = "entire covering; separation holds globally";
            return rep;
        case Kind::FlatExp:
        case Kind::LorenzFlat:
            break;
        default:
            fail(ErrorCode::Unsupported,
                 "separation geometry applies to flat or power kinds");
    }
    double ell, b;
    if (family.kind() == Kind::FlatExp) {
        const auto& s = std::get<FlatExpShape>(family.shape());
        ell = s.ell;
        b = s.b;
    } else {
        const auto& s = std::get<LorenzFlatShape>(family.shape());
        ell = s.ell;
        b = s.b;
    }
    double beta = flat_exp_beta(ell, b);
    rep.beta = beta;

    // Scan x0 > beta for the covering data: x1 = f_{-beta}(x0) with
    // x1 - beta > 2 (x0 - beta), R = x1 + beta < b, and diam(U) = 2 x0 < R.
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 400; ++i) {
        double t = std::pow(10.0, -4.0 + 4.0 * double(i) / 399.0);
        double x0 = beta * (1.0 + t);
        double x1 = b * std::exp(-std::pow(x0, -ell)) - beta;
        double m = std::min({x1 - beta - 2.0 * (x0 - beta), b - (x1 + beta),
                             x1 + beta - 2.0 * x0});
        if (m > best) {
            best = m;
            rep.x0 = x0;
            rep.x1 = x1;
            rep.R = x1 + beta;
        }
    }
    rep.margin = best;
    rep.ok = best > 0;
    if (family.kind() == Kind::LorenzFlat) {
        // Both branches share the same covering; the base parameters must
        // stay within the fixed-point window.
        bool inside = std::abs(params[0]) <= beta + 1e-12 &&
                      std::abs(params[1]) <= beta + 1e-12;
        rep.ok = rep.ok && inside;
        rep.detail = inside ? "both one-sided coverings verified"
                            : "parameters outside [-beta, beta]";
    } else {
        rep.detail = "covering data from the fixed-point window";
    }
    require(rep.ok, ErrorCode::GeometryFailed,
            "separation inequality failed: margin " + std::to_string(best));
    return rep;
}

}  // namespace kneadlab
