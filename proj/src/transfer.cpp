#include "kneadlab/transfer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

namespace kneadlab {

Spectrum spectrum(const MatrixXc& m) {
    require(m.rows() == m.cols(), ErrorCode::WrongShape, "matrix not square");
    require(m.rows() <= 256, ErrorCode::InvalidArgument,
            "spectrum limited to dimension 256");
    Spectrum s;
    if (m.rows() == 0) {
        s.eigenvalues = VectorXc();
        return s;
    }
    Eigen::ComplexEigenSolver<MatrixXc> ces(m, /*computeEigenvectors=*/false);
    require(ces.info() == Eigen::Success, ErrorCode::NoConvergence,
            "QR iteration did not converge");
    VectorXc ev = ces.eigenvalues();
    std::vector<Complex> v(ev.data(), ev.data() + ev.size());
    std::stable_sort(v.begin(), v.end(), [](Complex a, Complex b) {
        double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        return std::arg(a) < std::arg(b);
    });
    s.eigenvalues = Eigen::Map<VectorXc>(v.data(), v.size());
    s.spectral_radius = v.empty() ? 0.0 : std::abs(v.front());
    return s;
}

namespace {

/// Labels (i, j) of the operator indexed by orbit positions: i = 0 appears
/// only for marked points that are hit by a first-kind orbit.
std::vector<std::pair<int, int>> label_set(const OrbitDerivatives& d) {
    std::vector<bool> hit(d.nu, false);
    for (int j = 0; j < d.r; ++j) hit[d.mu[j]] = true;
    std::vector<std::pair<int, int>> labels;
    for (int j = 0; j < d.nu; ++j) {
        if (hit[j]) labels.emplace_back(0, j);
        for (int i = 1; i <= d.q[j] - 1; ++i) labels.emplace_back(i, j);
    }
    return labels;
}

}  // namespace

TransferMatrix labeled_transfer_operator(const MarkedOrbit& orbit,
                                         const OrbitDerivatives& d) {
    auto labels = label_set(d);
    auto idx = [&](int i, int j) {
        for (size_t n = 0; n < labels.size(); ++n)
            if (labels[n] == std::make_pair(i, j)) return int(n);
        fail(ErrorCode::WrongShape, "label not in index set");
    };
    // Column of the motion value at c_{1,k}: the label (1,k), or (0, mu(k))
    // when the orbit closes in a single step.
    auto col_c1 = [&](int k) {
        return d.q[k] >= 2 ? idx(1, k) : idx(0, d.mu[k]);
    };

    int n = int(labels.size());
    MatrixXc A = MatrixXc::Zero(n, n);
    for (int row = 0; row < n; ++row) {
        auto [i, j] = labels[row];
        if (i == 0) {
            for (int k = 0; k < d.nu; ++k)
                A(row, col_c1(k)) += d.p_jk[j][k];
            continue;
        }
        double inv_dg = 1.0 / d.dg[j][i];
        int fwd;  // label carrying v_{i+1,j}
        if (i < d.q[j] - 1)
            fwd = idx(i + 1, j);
        else if (j < d.r)
            fwd = idx(0, d.mu[j]);
        else
            fwd = idx(d.l[j], j);
        A(row, fwd) += inv_dg;
        for (int k = 0; k < d.nu; ++k)
            A(row, col_c1(k)) -= inv_dg * d.L[j][i][k];
    }

    TransferMatrix tm;
    tm.A = std::move(A);
    tm.index_pairs = std::move(labels);
    Spectrum s = spectrum(tm.A);
    tm.eigenvalues = s.eigenvalues;
    tm.spectral_radius = s.spectral_radius;
    (void)orbit;
    return tm;
}

TransferMatrix labeled_transfer_operator(const MarkedOrbit& orbit,
                                         const Deformation& def) {
    return labeled_transfer_operator(orbit, orbit_derivatives(orbit, def));
}

TransferMatrix transfer_operator(const MarkedOrbit& orbit,
                                 const OrbitDerivatives& d) {
    struct Slot {
        double key;
        int marked = -1;          // smallest marked index at this position
        int reg_i = -1, reg_j = -1;  // regular-point provenance
        int hits = 0;             // distinct regular labels at this position
    };
    std::vector<Slot> slots;
    auto find_slot = [&](double key) -> int {
        for (size_t n = 0; n < slots.size(); ++n) {
            double dist = orbit.circle
                              ? std::min(std::abs(slots[n].key - key),
                                         1.0 - std::abs(slots[n].key - key))
                              : std::abs(slots[n].key - key);
            if (dist <= orbit.tol) return int(n);
        }
        return -1;
    };
    auto add_slot = [&](double key) -> int {
        slots.push_back({key, -1, -1, -1, 0});
        return int(slots.size()) - 1;
    };

    // Marked points that are in g(P): those hit by a first-kind orbit.
    for (int j = 0; j < d.r; ++j) {
        int m = d.mu[j];
        double key = orbit.pts[m][0].key;
        int s = find_slot(key);
        if (s < 0) s = add_slot(key);
        if (slots[s].marked < 0 || m < slots[s].marked) slots[s].marked = m;
    }
    bool collision = false;
    for (int j = 0; j < d.nu; ++j) {
        for (int i = 1; i <= d.q[j] - 1; ++i) {
            double key = orbit.pts[j][i].key;
            int s = find_slot(key);
            if (s < 0) s = add_slot(key);
            if (slots[s].marked >= 0 || slots[s].hits > 0) collision = true;
            slots[s].reg_i = i;
            slots[s].reg_j = j;
            slots[s].hits += 1;
        }
    }
    if (collision) {
        TransferMatrix tm = labeled_transfer_operator(orbit, d);
        tm.fell_back_to_labels = true;
        return tm;
    }

    int n = int(slots.size());
    auto pos_of = [&](double key) {
        int s = find_slot(key);
        require(s >= 0, ErrorCode::WrongShape, "orbit point missing from g(P)");
        return s;
    };
    MatrixXc A = MatrixXc::Zero(n, n);
    for (int row = 0; row < n; ++row) {
        const Slot& slot = slots[row];
        if (slot.marked >= 0) {
            for (int k = 0; k < d.nu; ++k)
                A(row, pos_of(orbit.pts[k][1].key)) += d.p_jk[slot.marked][k];
            continue;
        }
        int i = slot.reg_i, j = slot.reg_j;
        double inv_dg = 1.0 / d.dg[j][i];
        A(row, pos_of(orbit.pts[j][i + 1].key)) += inv_dg;
        for (int k = 0; k < d.nu; ++k)
            A(row, pos_of(orbit.pts[k][1].key)) -= inv_dg * d.L[j][i][k];
    }

    TransferMatrix tm;
    tm.A = std::move(A);
    for (const auto& s : slots) tm.positions.push_back(s.key);
    Spectrum sp = spectrum(tm.A);
    tm.eigenvalues = sp.eigenvalues;
    tm.spectral_radius = sp.spectral_radius;
    return tm;
}

TransferMatrix transfer_operator(const MarkedOrbit& orbit,
                                 const Deformation& def) {
    return transfer_operator(orbit, orbit_derivatives(orbit, def));
}

double char_identity_check(const MarkedOrbit& orbit, const Deformation& def,
                           const std::vector<Complex>& rho_samples) {
    OrbitDerivatives d = orbit_derivatives(orbit, def);
    TransferMatrix aj = labeled_transfer_operator(orbit, d);
    auto exceptional = exceptional_values(orbit);
    int n = int(aj.A.rows());
    MatrixXc eye = MatrixXc::Identity(n, n);
    double worst = 0.0;
    for (Complex rho : rho_samples) {
        for (const auto& e : exceptional)
            require(std::abs(rho - e) > 1e-6, ErrorCode::InvalidArgument,
                    "rho sample too close to an exceptional value");
        Complex lhs = (eye - rho * aj.A).determinant();
        Complex rhs = char_matrix(d, rho).determinant();
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double scaled_triple_check(const MarkedOrbit& orbit, const Deformation& def,
                           double xi) {
    require(xi >= 0.0 && xi < 1.0, ErrorCode::InvalidArgument,
            "xi must lie in [0, 1)");
    OrbitDerivatives d = orbit_derivatives(orbit, def);
    TransferMatrix base = transfer_operator(orbit, d);
    TransferMatrix scaled = transfer_operator(orbit, d.scaled(xi));
    MatrixXc want = base.A / (1.0 - xi);
    return (scaled.A - want).cwiseAbs().maxCoeff();
}

std::vector<double> char_poly_coeffs(const TransferMatrix& tm) {
    // det(I - rho*A) = prod (1 - rho*lambda_i), expanded in rho.
    std::vector<Complex> coeff{1.0};
    for (int i = 0; i < tm.eigenvalues.size(); ++i) {
        Complex lam = tm.eigenvalues(i);
        std::vector<Complex> next(coeff.size() + 1, Complex(0.0, 0.0));
        for (size_t k = 0; k < coeff.size(); ++k) {
            next[k] += coeff[k];
            next[k + 1] -= coeff[k] * lam;
        }
        coeff = std::move(next);
    }
    std::vector<double> out(coeff.size());
    for (size_t k = 0; k < coeff.size(); ++k) out[k] = coeff[k].real();
    return out;
}

}  // namespace kneadlab
