#include "kneadlab/plmaps.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace kneadlab {

double PLSpec::eval(double x) const {
    int i = piece(x);
    return data.values[i - 1] + data.slopes[i - 1] * (x - data.c[i - 1]);
}

int PLSpec::piece(double x) const {
    require(x >= -1.0 - 1e-12 && x <= 1.0 + 1e-12, ErrorCode::DomainError,
            "point outside [-1, 1]");
    int nu1 = int(data.slopes.size());
    int i = int(std::upper_bound(data.c.begin() + 1, data.c.end() - 1, x) -
                data.c.begin());
    return std::min(std::max(i, 1), nu1);
}

PLSpec pl_from_values(int eps, int nu, const std::vector<double>& kappa,
                      const Params& v) {
    PLSpec spec;
    spec.shape = PiecewiseLinearShape{eps, nu, kappa};
    spec.v = v;
    spec.data = pl_data(spec.shape, v);
    return spec;
}

PLPartition pl_partition(const PLSpec& spec) {
    constexpr double merge_tol = 1e-12;
    std::vector<double> pts = {-1.0, 1.0};
    auto seen = [&](double x) {
        for (double p : pts)
            if (std::abs(p - x) <= merge_tol) return true;
        return false;
    };
    for (int j = 1; j <= spec.shape.nu; ++j)
        if (!seen(spec.data.c[j])) pts.push_back(spec.data.c[j]);

    for (int j = 1; j <= spec.shape.nu; ++j) {
        double x = spec.data.c[j];
        bool closed = false;
        for (int i = 0; i < 4096; ++i) {
            x = spec.eval(x);
            if (seen(x)) {
                closed = true;
                break;
            }
            pts.push_back(x);
        }
        require(closed, ErrorCode::OrbitNotFinite,
                "turning-point orbit did not close");
    }
    std::sort(pts.begin(), pts.end());

    PLPartition part;
    part.points = pts;
    int n = int(pts.size()) - 1;
    part.piece.resize(n);
    part.cover.resize(n);
    for (int i = 0; i < n; ++i) {
        double mid = 0.5 * (pts[i] + pts[i + 1]);
        part.piece[i] = spec.piece(mid);
        double ga = spec.eval(pts[i]), gb = spec.eval(pts[i + 1]);
        double lo = std::min(ga, gb), hi = std::max(ga, gb);
        for (int m = 0; m < n; ++m) {
            if (pts[m] >= lo - merge_tol && pts[m + 1] <= hi + merge_tol)
                part.cover[i].push_back(m);
        }
    }
    return part;
}

bool pl_ergodic(const PLSpec& spec) {
    PLPartition part = pl_partition(spec);
    int n = int(part.piece.size());
    // Forward-orbit closure of each interval in the cover graph.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
        std::vector<int> stack{i};
        reach[i][i] = true;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int m : part.cover[u]) {
                if (!reach[i][m]) {
                    reach[i][m] = true;
                    stack.push_back(m);
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool meet = false;
            for (int m = 0; m < n && !meet; ++m)
                meet = reach[i][m] && reach[j][m];
            if (!meet) return false;
        }
    }
    return true;
}

MarkovData pl_markov_matrix(const PLSpec& spec) {
    PLPartition part = pl_partition(spec);
    int n = int(part.piece.size());
    MarkovData md;
    md.widths.resize(n);
    for (int i = 0; i < n; ++i)
        md.widths[i] = part.points[i + 1] - part.points[i];

    // Row i of the width relation: s * kappa_i * v_i = sum of the covered
    // widths; normalised so that v = s A v and det(I - s A) = 0 hold.
    double s = spec.data.s;
    md.A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double row = 1.0 / (s * s * spec.shape.kappa[part.piece[i] - 1]);
        for (int m : part.cover[i]) md.A(i, m) = row;
    }
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int m = 0; m < n; ++m) sum += md.A(i, m) * md.widths[m];
        resid = std::max(resid, std::abs(md.widths[i] - s * sum));
    }
    md.residual = resid;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - s * md.A;
    md.det = m.determinant();
    return md;
}

LorenzRReport lorenz_R(const Family& family, const Params& params,
                       const std::vector<Relation>& relations) {
    require(family.kind() == Kind::LorenzAffine ||
                family.kind() == Kind::LorenzFlat,
            ErrorCode::WrongShape, "closure map defined for Lorenz kinds");
    require(relations.size() == 2, ErrorCode::InvalidArgument,
            "need two relations");

    auto crit = family.critical_data(params);
    LorenzRReport rep;
    rep.base_w = {Complex(crit[0].value, 0.0), Complex(crit[1].value, 0.0)};

    // R in the critical-value chart: map w back to family parameters, run
    // the closure relations of both sides.
    auto params_of_w = [&](const std::vector<double>& w) -> Params {
        if (family.kind() == Kind::LorenzAffine) {
            double t = 1.0 + 0.5 * (w[0] - w[1]);
            double c = (w[0] + w[1]) / (2.0 * t);
            return {t, c};
        }
        return {w[0], w[1]};
    };
    auto R_of_w = [&](const std::vector<double>& w) {
        Params p = params_of_w(w);
        auto cd = family.critical_data(p);
        std::vector<double> out;
        for (const auto& rel : relations) {
            SidedPoint start = cd[rel.marked_index].point;
            double x = start.x;
            for (int i = 0; i < rel.period; ++i)
                x = family.eval(p, i == 0 ? start : at(x));
            out.push_back(x - start.x);
        }
        return out;
    };

    std::vector<double> w0 = {crit[0].value, crit[1].value};
    rep.residual = R_of_w(w0);

    rep.jacobian_fd = MatrixXc(2, 2);
    for (int k = 0; k < 2; ++k) {
        double h = 1e-6 * (1.0 + std::abs(w0[k]));
        auto wp = w0, wm = w0;
        wp[k] += h;
        wm[k] -= h;
        auto rp = R_of_w(wp), rm = R_of_w(wm);
        for (int i = 0; i < 2; ++i)
            rep.jacobian_fd(i, k) = (rp[i] - rm[i]) / (2.0 * h);
    }

    MarkedOrbit orbit = marked_orbit(family, params);
    double denom = 1.0;
    for (int j = 0; j < orbit.nu; ++j)
        denom *= orbit.dg_prod(j, orbit.q(j) - 1);
    rep.quotient = rep.jacobian_fd.determinant().real() / denom;
    rep.positive = rep.quotient > 0;
    return rep;
}

std::pair<double, double> tent_lorenz_entropy_bridge(double t) {
    require(t > 1.0 && t <= 2.0, ErrorCode::InvalidArgument,
            "slope must lie in (1, 2]");
    return {std::log(t), std::log(t)};
}

}  // namespace kneadlab
