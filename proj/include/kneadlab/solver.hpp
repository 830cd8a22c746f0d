#pragma once

#include <optional>
#include <vector>

#include "kneadlab/families.hpp"
#include "kneadlab/kneading.hpp"

namespace kneadlab {

struct OrbitPoint {
    double x = 0.0;      // position (an unreduced lift for circle kinds)
    double key = 0.0;    // identification key (mod 1 for circle kinds)
    Side side = Side::TwoSided;
    int branch = 0;      // analytic branch for complex continuation
    double dg = 0.0;     // g'(x); NaN at marked points
};

struct CriticalRelation {
    bool first_kind = true;
    int q = 0;          // closure step (minimal)
    int mu = 0;         // first kind: sorted index of the marked point hit
    int l = 0;          // second kind: minimal tail index with c_q = c_l
    double wrap = 0.0;  // integer offset absorbed by circle lifts
};

/// Finite marked set data of a critically-finite parameter: for each marked
/// point j the orbit c_{i,j} = g^i(c_{0,j}) up to its closure, the closure
/// relation, and the orbit derivatives. Orbits are sorted with first-kind
/// relations first; label[j] is the family-native index of marked point j.
struct MarkedOrbit {
    int nu = 0;
    int r = 0;  // orbits 0..r-1 are first-kind
    std::vector<std::vector<OrbitPoint>> pts;  // pts[j][i], i = 0..q_j
    std::vector<CriticalRelation> rel;
    std::vector<int> label;
    double tol = 1e-9;
    bool circle = false;

    int q(int j) const { return rel[j].q; }
    int l(int j) const { return rel[j].l; }
    int mu(int j) const { return rel[j].mu; }

    /// Dg^n(c_{1,j}) = product of g'(c_{i,j}) for i = 1..n (Dg^0 = 1).
    double dg_prod(int j, int n) const {
        double prod = 1.0;
        for (int i = 1; i <= n; ++i) prod *= pts[j][i].dg;
        require(std::isfinite(prod), ErrorCode::Overflow,
                "orbit derivative product overflowed");
        return prod;
    }
};

struct SolveResult {
    double param = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Parameter with the marked point periodic of minimal period exactly q,
/// located by subdividing the bracket and polishing each sign change.
SolveResult solve_superstable(const Family& family, int q, double lo,
                              double hi, int subdivisions = 10000);

/// All superstable parameters of minimal period <= q_max that a sign-change
/// scan resolves on [lo, hi]; pairs (parameter, period), ascending in q.
std::vector<std::pair<double, int>> superstable_scan(const Family& family,
                                                     int q_max, double lo,
                                                     double hi,
                                                     int subdivisions = 10000);

/// Parameter whose kneading word equals `word` (which must end in 0),
/// found by bisection driven by the MT order, then polished.
SolveResult solve_word(const Family& family, const KneadingSequence& word,
                       double lo, double hi, double delta_hit = 1e-9);

struct Relation {
    int marked_index = 0;  // index into Family::critical_data order
    int period = 1;
    std::optional<std::string> word;  // verified after solving when given
};

struct Solve2DResult {
    Params params;
    double residual = 0.0;
    int iterations = 0;
};

/// Damped Newton (central-difference Jacobian) on the two closure relations
/// of a two-parameter family.
Solve2DResult solve_two_param(const Family& family,
                              const std::vector<Relation>& relations,
                              Params initial);

/// Best seed on an n x n grid over the parameter box for solve_two_param.
Params coarse_seed_2d(const Family& family,
                      const std::vector<Relation>& relations, Params lo,
                      Params hi, int n = 48);

/// Extract the marked-set combinatorics of a critically-finite parameter.
MarkedOrbit marked_orbit(const Family& family, const Params& params,
                         std::optional<double> tol = std::nullopt);

}  // namespace kneadlab
