#pragma once

#include <Eigen/Dense>

#include "kneadlab/solver.hpp"

namespace kneadlab {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// Base-point derivative data of a deformation along a marked orbit, in the
/// orbit's sorted indexing: everything the characteristic matrix and the
/// transfer operators are assembled from.
struct OrbitDerivatives {
    int nu = 0;
    int r = 0;
    std::vector<int> q, l, mu;
    std::vector<double> wrap;
    // dg[j][i] = g'(c_{i,j}) for i = 1..q_j-1  (entry 0 unused)
    std::vector<std::vector<double>> dg;
    // L[j][i][k] = dG/dw_k(c_1; c_{i,j}) for i = 1..q_j-1, k in sorted coords
    std::vector<std::vector<CVec>> L;
    // p_jk[j][k] = dp_j/dw_k(c_1) in sorted coords
    std::vector<CVec> p_jk;

    double dg_prod(int j, int n) const {
        double prod = 1.0;
        for (int i = 1; i <= n; ++i) prod *= dg[j][i];
        return prod;
    }

    /// Data of the rescaled triple: g' scaled by (1-xi), dp by 1/(1-xi).
    OrbitDerivatives scaled(double xi) const;
};

OrbitDerivatives orbit_derivatives(const MarkedOrbit& orbit,
                                   const Deformation& def);

/// The critical-relations map evaluated at w (sorted coordinates):
/// R_j = G_w^{q_j-1}(w_j) - p_{mu(j)}(w) for first-kind orbits and
/// R_j = G_w^{q_j-1}(w_j) - G_w^{l_j-1}(w_j) for second-kind orbits.
CVec critical_relations(const MarkedOrbit& orbit, const Deformation& def,
                        const CVec& w);

/// Analytic (chain-rule) Jacobian of the critical relations at the base.
MatrixXc critical_relations_jacobian(const MarkedOrbit& orbit,
                                     const Deformation& def);

/// Sum of reciprocal orbit derivatives 1/Dg^n(c_1), n = 0..q-1, for a
/// single periodic critical orbit.
double transversality_sum(const MarkedOrbit& orbit);

/// The characteristic matrix D(rho).
MatrixXc char_matrix(const OrbitDerivatives& data, Complex rho);
MatrixXc char_matrix(const MarkedOrbit& orbit, const Deformation& def,
                     Complex rho);

/// Parameters rho with rho^(q-l) equal to the multiplier of a periodic tail
/// shared by two second-kind orbits; det D(rho) vanishes there identically.
std::vector<Complex> exceptional_values(const MarkedOrbit& orbit);

/// Sign test det DR(c_1) / prod_j Dg^(q_j-1)(c_{1,j}) > 0. Throws
/// ZeroDeterminant when |quotient| falls under 1e-10.
std::pair<bool, double> positively_oriented(const MarkedOrbit& orbit,
                                            const Deformation& def);

/// Same computation with the near-zero case flagged instead of thrown.
struct TransversalityReport {
    double quotient = 0.0;
    double det_D1 = 0.0;
    bool positive = false;
    bool inconclusive = false;  // |quotient| under the zero threshold
    std::vector<Complex> exceptional;
};
TransversalityReport transversality_report(const MarkedOrbit& orbit,
                                           const Deformation& def);

}  // namespace kneadlab
