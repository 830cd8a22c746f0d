#pragma once

#include "kneadlab/transversality.hpp"

namespace kneadlab {

struct TransferMatrix {
    MatrixXc A;
    // A_J indexing: orbit labels (i, j); point indexing: positions in g(P).
    std::vector<std::pair<int, int>> index_pairs;
    std::vector<double> positions;
    VectorXc eigenvalues;  // descending modulus, ties broken by argument
    double spectral_radius = 0.0;
    bool fell_back_to_labels = false;
};

struct Spectrum {
    VectorXc eigenvalues;
    double spectral_radius = 0.0;
};

/// Eigenvalues by Hessenberg reduction + shifted QR (dense), sorted by
/// descending modulus with a deterministic tie-break by argument.
Spectrum spectrum(const MatrixXc& m);

/// The operator indexed by orbit labels (i, j): well-defined even when two
/// orbit points share a position.
TransferMatrix labeled_transfer_operator(const MarkedOrbit& orbit,
                                         const Deformation& def);
TransferMatrix labeled_transfer_operator(const MarkedOrbit& orbit,
                                         const OrbitDerivatives& data);

/// The operator on the points of g(P). Falls back to the labeled operator
/// (with a flag) when distinct orbit labels collide at one position.
TransferMatrix transfer_operator(const MarkedOrbit& orbit,
                                 const Deformation& def);
TransferMatrix transfer_operator(const MarkedOrbit& orbit,
                                 const OrbitDerivatives& data);

/// Max over the samples of |det(I - rho*A_J) - det D(rho)|; samples within
/// 1e-6 of an exceptional value are rejected.
double char_identity_check(const MarkedOrbit& orbit, const Deformation& def,
                           const std::vector<Complex>& rho_samples);

/// Entrywise check that the rescaled triple's operator equals
/// (1-xi)^{-1} * A; returns the max entry deviation.
double scaled_triple_check(const MarkedOrbit& orbit, const Deformation& def,
                           double xi);

/// det(I - rho*A) as a polynomial in rho (coefficients from the eigenvalues).
std::vector<double> char_poly_coeffs(const TransferMatrix& tm);

}  // namespace kneadlab
