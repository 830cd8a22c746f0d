#include "kneadlab/transversality.hpp"

#include <cmath>

namespace kneadlab {

namespace {

/// w in sorted coordinates -> family-native coordinate vector.
CVec to_native(const MarkedOrbit& orbit, const CVec& w) {
    CVec native(w.size());
    for (int j = 0; j < orbit.nu; ++j) native[orbit.label[j]] = w[j];
    return native;
}

CVec permute_to_sorted(const MarkedOrbit& orbit, const CVec& native) {
    CVec sorted(native.size());
    for (int k = 0; k < orbit.nu; ++k) sorted[k] = native[orbit.label[k]];
    return sorted;
}

}  // namespace

OrbitDerivatives orbit_derivatives(const MarkedOrbit& orbit,
                                   const Deformation& def) {
    require(def.nu() == orbit.nu, ErrorCode::WrongShape,
            "deformation dimension does not match the orbit");
    OrbitDerivatives d;
    d.nu = orbit.nu;
    d.r = orbit.r;
    const CVec& base_native = def.base_w();
    for (int j = 0; j < orbit.nu; ++j) {
        d.q.push_back(orbit.q(j));
        d.l.push_back(orbit.rel[j].first_kind ? 0 : orbit.l(j));
        d.mu.push_back(orbit.rel[j].first_kind ? orbit.mu(j) : 0);
        d.wrap.push_back(orbit.rel[j].wrap);

        std::vector<double> dg(orbit.q(j), 0.0);
        std::vector<CVec> L(orbit.q(j));
        for (int i = 1; i <= orbit.q(j) - 1; ++i) {
            const OrbitPoint& pt = orbit.pts[j][i];
            dg[i] = pt.dg;
            L[i] = permute_to_sorted(
                orbit, def.dG_dw(base_native, Complex(pt.x, 0.0), pt.branch));
        }
        d.dg.push_back(std::move(dg));
        d.L.push_back(std::move(L));
        d.p_jk.push_back(
            permute_to_sorted(orbit, def.dp_dw(base_native, orbit.label[j])));
    }
    return d;
}

OrbitDerivatives OrbitDerivatives::scaled(double xi) const {
    OrbitDerivatives out = *this;
    for (auto& row : out.dg)
        for (double& v : row) v *= (1.0 - xi);
    for (auto& row : out.p_jk)
        for (Complex& v : row) v /= (1.0 - xi);
    return out;
}

CVec critical_relations(const MarkedOrbit& orbit, const Deformation& def,
                        const CVec& w) {
    require(int(w.size()) == orbit.nu, ErrorCode::WrongShape,
            "w has wrong dimension");
    CVec native = to_native(orbit, w);
    CVec out(orbit.nu);
    for (int j = 0; j < orbit.nu; ++j) {
        int qj = orbit.q(j);
        Complex z = w[j];
        Complex z_at_l = z;  // G^{l-1}(w_j); the init covers l = 1
        for (int i = 1; i <= qj - 1; ++i) {
            z = def.G(native, z, orbit.pts[j][i].branch);
            if (!orbit.rel[j].first_kind && i + 1 == orbit.l(j)) z_at_l = z;
        }
        if (orbit.rel[j].first_kind) {
            out[j] = z - def.p(native, orbit.label[orbit.mu(j)]) -
                     orbit.rel[j].wrap;
        } else {
            out[j] = z - z_at_l - orbit.rel[j].wrap;
        }
    }
    return out;
}

MatrixXc critical_relations_jacobian(const MarkedOrbit& orbit,
                                     const Deformation& def) {
    CVec base_sorted = permute_to_sorted(orbit, def.base_w());
    CVec native = def.base_w();
    MatrixXc J(orbit.nu, orbit.nu);
    for (int j = 0; j < orbit.nu; ++j) {
        int qj = orbit.q(j);
        // Forward recurrence D_{i+1} = L(c_i) + g'(c_i) D_i with D_1 = e_j,
        // following the base orbit.
        VectorXc D = VectorXc::Zero(orbit.nu);
        D(j) = 1.0;
        VectorXc D_at_l = D;
        if (!orbit.rel[j].first_kind && orbit.l(j) == 1) D_at_l = D;
        for (int i = 1; i <= qj - 1; ++i) {
            const OrbitPoint& pt = orbit.pts[j][i];
            CVec Lk = permute_to_sorted(
                orbit, def.dG_dw(native, Complex(pt.x, 0.0), pt.branch));
            VectorXc next(orbit.nu);
            for (int k = 0; k < orbit.nu; ++k)
                next(k) = Lk[k] + pt.dg * D(k);
            D = next;
            if (!orbit.rel[j].first_kind && i + 1 == orbit.l(j)) D_at_l = D;
        }
        if (orbit.rel[j].first_kind) {
            CVec dp = permute_to_sorted(
                orbit, def.dp_dw(native, orbit.label[orbit.mu(j)]));
            for (int k = 0; k < orbit.nu; ++k) J(j, k) = D(k) - dp[k];
        } else {
            for (int k = 0; k < orbit.nu; ++k) J(j, k) = D(k) - D_at_l(k);
        }
    }
    return J;
}

double transversality_sum(const MarkedOrbit& orbit) {
    require(orbit.nu == 1 && orbit.r == 1, ErrorCode::WrongShape,
            "reciprocal-derivative sum needs a single first-kind orbit");
    double sum = 0.0;
    for (int n = 0; n <= orbit.q(0) - 1; ++n)
        sum += 1.0 / orbit.dg_prod(0, n);
    return sum;
}

MatrixXc char_matrix(const OrbitDerivatives& d, Complex rho) {
    MatrixXc D(d.nu, d.nu);
    for (int j = 0; j < d.nu; ++j) {
        int qj = d.q[j];
        // script-L sums: sum_{n=1}^m rho^n L_k(c_{n,j}) / Dg^n(c_{1,j})
        auto script_L = [&](int m, int k) {
            Complex sum = 0.0;
            Complex rho_n = 1.0;
            double dg_n = 1.0;
            for (int n = 1; n <= m; ++n) {
                rho_n *= rho;
                dg_n *= d.dg[j][n];
                sum += rho_n * d.L[j][n][k] / dg_n;
            }
            return sum;
        };
        Complex rho_q = std::pow(rho, double(qj));
        for (int k = 0; k < d.nu; ++k) {
            Complex v = (j == k ? 1.0 : 0.0) + script_L(qj - 1, k);
            if (j < d.r) {
                v -= rho_q * d.p_jk[d.mu[j]][k] / d.dg_prod(j, qj - 1);
            } else {
                int lj = d.l[j];
                double dg_tail = d.dg_prod(j, qj - 1) / d.dg_prod(j, lj - 1);
                Complex rho_tail = std::pow(rho, double(qj - lj));
                Complex inner = script_L(lj - 1, k) + (j == k ? 1.0 : 0.0);
                v -= rho_tail / dg_tail * inner;
            }
            D(j, k) = v;
        }
    }
    return D;
}

MatrixXc char_matrix(const MarkedOrbit& orbit, const Deformation& def,
                     Complex rho) {
    return char_matrix(orbit_derivatives(orbit, def), rho);
}

std::vector<Complex> exceptional_values(const MarkedOrbit& orbit) {
    std::vector<Complex> out;
    for (int j = orbit.r; j < orbit.nu; ++j) {
        for (int jp = j + 1; jp < orbit.nu; ++jp) {
            double end_j = orbit.pts[j][orbit.q(j)].key;
            double end_jp = orbit.pts[jp][orbit.q(jp)].key;
            double dist = orbit.circle
                              ? std::min(std::abs(end_j - end_jp),
                                         1.0 - std::abs(end_j - end_jp))
                              : std::abs(end_j - end_jp);
            if (dist > orbit.tol) continue;
            int m = orbit.q(j) - orbit.l(j);
            double mult =
                orbit.dg_prod(j, orbit.q(j) - 1) / orbit.dg_prod(j, orbit.l(j) - 1);
            double radius = std::pow(std::abs(mult), 1.0 / m);
            double phase = mult >= 0 ? 0.0 : 3.14159265358979323846;
            for (int k = 0; k < m; ++k) {
                double ang = (phase + 2.0 * 3.14159265358979323846 * k) / m;
                Complex rho = radius * Complex(std::cos(ang), std::sin(ang));
                bool dup = false;
                for (const auto& e : out)
                    if (std::abs(e - rho) < 1e-9) dup = true;
                if (!dup) out.push_back(rho);
            }
        }
    }
    return out;
}

std::pair<bool, double> positively_oriented(const MarkedOrbit& orbit,
                                            const Deformation& def) {
    auto rep = transversality_report(orbit, def);
    require(!rep.inconclusive, ErrorCode::ZeroDeterminant,
            "relations Jacobian determinant is numerically zero");
    return {rep.positive, rep.quotient};
}

TransversalityReport transversality_report(const MarkedOrbit& orbit,
                                           const Deformation& def) {
    MatrixXc J = critical_relations_jacobian(orbit, def);
    Complex det = J.determinant();
    double denom = 1.0;
    for (int j = 0; j < orbit.nu; ++j) denom *= orbit.dg_prod(j, orbit.q(j) - 1);
    Complex quotient = det / denom;

    TransversalityReport rep;
    rep.quotient = quotient.real();
    rep.det_D1 =
        char_matrix(orbit, def, Complex(1.0, 0.0)).determinant().real();
    rep.exceptional = exceptional_values(orbit);
    rep.inconclusive = std::abs(quotient) < 1e-10;
    rep.positive = !rep.inconclusive && rep.quotient > 0.0;
    return rep;
}

}  // namespace kneadlab
