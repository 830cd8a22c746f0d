#pragma once

#include "kneadlab/transfer.hpp"

namespace kneadlab {

struct GridSpec {
    int rays = 16;
    int radii = 24;
    double r_max = 0.3;
};

/// A sampled holomorphic motion of a finite point set over a disk: values at
/// lambda = r_k * exp(i*angle_m); the value at lambda = 0 is the base point.
struct MotionGrid {
    std::vector<double> base;
    std::vector<double> radii;   // increasing, no zero entry
    std::vector<double> angles;  // 2*pi*m/rays
    // values[point][ray][radius]
    std::vector<std::vector<std::vector<Complex>>> values;
    bool real_mode = false;

    int points() const { return int(base.size()); }
    int rays() const { return int(angles.size()); }
    int nradii() const { return int(radii.size()); }
    Complex lambda(int ray, int rad) const {
        return radii[rad] * Complex(std::cos(angles[ray]), std::sin(angles[ray]));
    }
    int find_point(double x, double tol = 1e-9) const;

    /// Max over points and samples of |h(x) - x|.
    double sup_distance_to_identity() const;
    /// d/dlambda at 0 by a 4-point Cauchy integral on the smallest circle.
    CVec derivative_at_zero() const;
};

/// First-order motion h_lambda(x) = x + lambda*v(x) over the sampling grid.
MotionGrid first_order_motion(const std::vector<double>& points, const CVec& v,
                              const GridSpec& spec);

/// Random first-order motion, deterministic in the seed. In real mode the
/// direction vector is real; otherwise its re/im parts are iid in [-s, s].
MotionGrid random_motion(const std::vector<double>& points, double sigma,
                         std::uint64_t seed, const GridSpec& spec,
                         bool real_mode);

/// The points of g(P) with provenance into the orbit.
struct GPPoint {
    double key = 0.0;
    int marked = -1;  // sorted marked index when this is a marked point
    int i = -1, j = -1;
};
std::vector<GPPoint> g_of_P(const MarkedOrbit& orbit);  // CollidingOrbitPoints

/// Random motion of g(P).
MotionGrid make_motion(const MarkedOrbit& orbit, double sigma,
                       std::uint64_t seed, const GridSpec& spec,
                       bool real_mode = false);

/// Lift of a motion of g(P): solves G_{c1(lambda)}(.) = h(g(x)) along each
/// ray with seeded Newton continuation (closed-form roots for the power-law
/// kinds), and moves marked points by p(c1(lambda)).
MotionGrid lift_motion(const MotionGrid& motion, const MarkedOrbit& orbit,
                       const Deformation& def);

struct LiftDecay {
    std::vector<double> sup_distances;  // d_k, k = 1..count
    double rate = 0.0;                  // log-linear fit of the tail
};

/// Iterate lifts k times, recording sup-distances to the identity and the
/// fitted geometric decay rate over the last k/2 entries.
LiftDecay iterate_lifts(const MotionGrid& motion, const MarkedOrbit& orbit,
                        const Deformation& def, int k);

/// Largest radius at which one lift of a small test motion succeeds, scaled
/// by 0.3; used when no explicit r_max is given.
double estimate_r_max(const MarkedOrbit& orbit, const Deformation& def,
                      double sigma = 1e-3, std::uint64_t seed = 1);

// --- Sector geometry -------------------------------------------------------

/// Angle at z of the triangle (0, z, 1), in [0, pi].
double angle_0z1(Complex z);
/// z in the open sector |arg z| < theta (z != 0).
bool in_sector(Complex z, double theta);

struct SectorParams {
    double theta = 0.05;
    double ell = 60.0;
};

struct RegularityReport {
    bool ok = false;
    double sector_margin = 0.0;  // min over samples of 4*theta/ell - |arg|
    double angle_margin = 0.0;   // min over pairs of angle(0,z,1) - (pi-theta)
    int offender_point = -1;
};

/// Sector-regularity of a motion of the critical orbit: points stay in the
/// sectors +-S_{4 theta/ell} and ratios of same-sign points stay in the
/// angular domain D_theta.
RegularityReport theta_regular_check(const MotionGrid& motion,
                                     const SectorParams& sector);

// --- Odd-exponent machinery ------------------------------------------------

struct OddConstants {
    double theta = 0.0;
    double R = 0.0;
    double residual = 0.0;      // defect of the defining equation at R
    double lemma_margin = 0.0;  // 2 R cos(theta/ell^2) - 2^(1/(ell-1)) - 2^(1/(ell^2-ell))
};
OddConstants odd_constants(int ell);

/// Context of an odd-exponent map |x|^ell + c1 with a periodic critical
/// point, its reversing fixed point -w and the symmetric pair +-z1.
struct OddOrbitContext {
    int ell = 3;
    double c1 = 0.0;
    int q = 0;  // f^{q+1}(0) = 0
    double w = 0.0;
    double z1 = 0.0;
    OddConstants constants;
    std::vector<double> points;  // orbit of 0 joined with -z1
};
OddOrbitContext odd_orbit_context(int ell, double c1);

/// Closed-form lift for the odd-exponent context, antisymmetric by
/// construction.
MotionGrid lift_odd_motion(const MotionGrid& motion,
                           const OddOrbitContext& ctx);

/// Random motion of the odd-orbit point set with the pair +-z1
/// antisymmetrised and 0 pinned.
MotionGrid odd_random_motion(const OddOrbitContext& ctx, double sigma,
                             std::uint64_t seed, const GridSpec& spec);

struct AdmissibilityReport {
    bool ok = false;
    // margins of the eight conditions, in order; >= 0 means satisfied
    double margins[8] = {0, 0, 0, 0, 0, 0, 0, 0};
};
AdmissibilityReport admissible_check(const MotionGrid& motion,
                                     const OddOrbitContext& ctx);

// --- Separation geometry ----------------------------------------------------

struct SeparationReport {
    bool ok = false;
    bool trivial = false;  // entire covering; nothing to measure
    double beta = 0.0;
    double x0 = 0.0, x1 = 0.0, R = 0.0;
    double margin = 0.0;  // min slack of the defining inequalities
    std::string detail;
};
SeparationReport separation_check(const Family& family, const Params& params);

}  // namespace kneadlab
