#pragma once

#include "kneadlab/solver.hpp"
#include "kneadlab/transversality.hpp"

namespace kneadlab {

/// A concrete nu-modal piecewise-linear map on [-1, 1] described by its
/// extremal values, with the turning points and slopes solved out.
struct PLSpec {
    PiecewiseLinearShape shape;
    Params v;     // extremal values at the turning points
    PLData data;  // slope scale, turning points, branch slopes

    double eval(double x) const;
    int piece(double x) const;  // 1-based branch index
};

PLSpec pl_from_values(int eps, int nu, const std::vector<double>& kappa,
                      const Params& v);

/// Partition of [-1, 1] by the (finite) forward orbits of the turning
/// points, with the branch of each interval and the cover relation
/// I_m subset g(I_i).
struct PLPartition {
    std::vector<double> points;           // a_0 < ... < a_n
    std::vector<int> piece;               // branch containing each interval
    std::vector<std::vector<int>> cover;  // cover[i] = intervals inside g(I_i)
};
PLPartition pl_partition(const PLSpec& spec);  // OrbitNotFinite if orbits stay open

/// Lebesgue ergodicity via the cover graph: every two intervals must have
/// intersecting forward orbits.
bool pl_ergodic(const PLSpec& spec);

struct MarkovData {
    Eigen::MatrixXd A;
    std::vector<double> widths;
    double residual = 0.0;  // || v - s A v ||_inf on the width vector
    double det = 0.0;       // det(I - s A)
};
MarkovData pl_markov_matrix(const PLSpec& spec);

/// The two-relation closure map of a Lorenz family in the critical-value
/// chart, with a finite-difference Jacobian and the orientation quotient.
struct LorenzRReport {
    CVec base_w;
    std::vector<double> residual;  // R at the base point
    MatrixXc jacobian_fd;
    double quotient = 0.0;
    bool positive = false;
};
LorenzRReport lorenz_R(const Family& family, const Params& params,
                       const std::vector<Relation>& relations);

/// Entropy of the symmetric Lorenz map and of the tent map at slope t: both
/// equal log t.
std::pair<double, double> tent_lorenz_entropy_bridge(double t);

}  // namespace kneadlab
