#include "kneadlab/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kneadlab/rootfind.hpp"

namespace kneadlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

template <class T>
T sq(T x) {
    return x * x;
}

}  // namespace

// ---------------------------------------------------------------------------
// CoreMap
// ---------------------------------------------------------------------------

CoreMap CoreMap::builtin(const std::string& name, int m) {
    CoreMap f;
    f.name_ = name;
    f.m_ = m;
    if (name == "sin") {
        f.id_ = Id::Sin;
        f.odd_ = true;
        f.crit_ = kPi / 2;
        f.b_ = kPi;
    } else if (name == "logistic") {
        f.id_ = Id::Logistic;
        f.crit_ = 0.5;
        f.b_ = 1.0;
    } else if (name == "exp_logistic") {
        f.id_ = Id::ExpLogistic;
        f.crit_ = std::log(2.0);
        f.b_ = std::numeric_limits<double>::infinity();
    } else if (name == "sin_sq") {
        f.id_ = Id::SinSq;
        f.crit_ = kPi / 2;
        f.b_ = kPi;
    } else if (name == "xm_gauss") {
        require(m >= 1 && m % 2 == 1, ErrorCode::InvalidArgument,
                "xm_gauss core needs odd m >= 1");
        f.id_ = Id::XmGauss;
        f.odd_ = true;
        f.crit_ = std::sqrt(m / 2.0);
        f.b_ = std::numeric_limits<double>::infinity();
    } else {
        fail(ErrorCode::InvalidArgument, "unknown core map '" + name + "'");
    }
    require(std::abs(f.value(0.0)) <= 1e-12, ErrorCode::InvalidArgument,
            "core map must fix 0");
    require(std::abs(std::abs(f.value(f.crit_)) - 1.0) <= 1e-9,
            ErrorCode::InvalidArgument, "core map critical value must be 1");
    return f;
}

template <class T>
static T core_value(CoreMap::Id id, int m, T z) {
    switch (id) {
        case CoreMap::Id::Sin:
            return sin(z);
        case CoreMap::Id::Logistic:
            return 4.0 * z * (1.0 - z);
        case CoreMap::Id::ExpLogistic:
            return 4.0 * exp(-z) * (1.0 - exp(-z));
        case CoreMap::Id::SinSq:
            return sq(sin(z));
        case CoreMap::Id::XmGauss: {
            double k = std::pow(m / 2.0, -m / 2.0) * std::exp(m / 2.0);
            T zm = z;
            for (int i = 1; i < m; ++i) zm *= z;
            return k * zm * exp(-z * z);
        }
    }
    return T{};
}

template <class T>
static T core_deriv(CoreMap::Id id, int m, T z) {
    switch (id) {
        case CoreMap::Id::Sin:
            return cos(z);
        case CoreMap::Id::Logistic:
            return 4.0 - 8.0 * z;
        case CoreMap::Id::ExpLogistic:
            return 4.0 * (2.0 * exp(-2.0 * z) - exp(-z));
        case CoreMap::Id::SinSq:
            return sin(2.0 * z);
        case CoreMap::Id::XmGauss: {
            double k = std::pow(m / 2.0, -m / 2.0) * std::exp(m / 2.0);
            T zm1 = T(1);
            for (int i = 1; i < m; ++i) zm1 *= z;
            return k * zm1 * exp(-z * z) * (double(m) - 2.0 * z * z);
        }
    }
    return T{};
}

double CoreMap::value(double x) const { return core_value(id_, m_, x); }
double CoreMap::deriv(double x) const { return core_deriv(id_, m_, x); }
Complex CoreMap::value(Complex z) const { return core_value(id_, m_, z); }
Complex CoreMap::deriv(Complex z) const { return core_deriv(id_, m_, z); }

// ---------------------------------------------------------------------------
// PL construction (shared with plmaps)
// ---------------------------------------------------------------------------

PLData pl_data(const PiecewiseLinearShape& shape, const Params& v) {
    int nu = shape.nu;
    require(int(shape.kappa.size()) == nu + 1, ErrorCode::InvalidArgument,
            "kappa must have nu+1 entries");
    for (double k : shape.kappa)
        require(k > 0, ErrorCode::InvalidArgument, "kappa entries must be > 0");
    require(int(v.size()) == nu, ErrorCode::InvalidValueVector,
            "value vector must have nu entries");

    auto eps_i = [&](int i) { return (i % 2 == 1) ? shape.eps : -shape.eps; };
    auto value_at = [&](int i) -> double {
        if (i == 0) return -eps_i(1);
        if (i == nu + 1) return eps_i(nu + 1);
        return v[i - 1];
    };

    PLData d;
    d.values.resize(nu + 2);
    double s = 0.0;
    for (int i = 1; i <= nu + 1; ++i) {
        double delta = (value_at(i) - value_at(i - 1)) * eps_i(i);
        require(delta > 0, ErrorCode::InvalidValueVector,
                "extremal values must alternate strictly");
        s += delta / (2.0 * shape.kappa[i - 1]);
    }
    require(s > 0, ErrorCode::InvalidValueVector, "slope scale must be > 0");
    d.s = s;
    d.c.resize(nu + 2);
    d.slopes.resize(nu + 1);
    d.c[0] = -1.0;
    for (int i = 1; i <= nu + 1; ++i) {
        double delta = (value_at(i) - value_at(i - 1)) * eps_i(i);
        d.c[i] = d.c[i - 1] + delta / (shape.kappa[i - 1] * s);
        d.slopes[i - 1] = eps_i(i) * shape.kappa[i - 1] * s;
    }
    for (int i = 0; i <= nu + 1; ++i) d.values[i] = value_at(i);
    return d;
}

// ---------------------------------------------------------------------------
// Real evaluation per kind
// ---------------------------------------------------------------------------

namespace {

double flat_exp_value(double ell, double b, double x) {
    if (x == 0.0) return 0.0;  // the translation parameter is added by callers
    return b * std::exp(-std::pow(std::abs(x), -ell));
}

double flat_exp_deriv(double ell, double b, double x) {
    if (x == 0.0) return 0.0;  // flat critical point
    double ax = std::abs(x);
    double v = b * std::exp(-std::pow(ax, -ell)) * ell * std::pow(ax, -ell - 1);
    return x > 0 ? v : -v;
}

/// beta solves 2*x*exp(1/x^ell) = b on (0, ell^(1/ell)).
double flat_beta(double ell, double b) {
    double hi = std::pow(ell, 1.0 / ell);
    auto f = [&](double x) { return 2.0 * x * std::exp(std::pow(x, -ell)) - b; };
    return bisect(f, 1e-8, hi);
}

int lorenz_branch(double c, SidedPoint p) {
    if (p.x < c) return 1;
    if (p.x > c) return 2;
    if (p.side == Side::Minus) return 1;
    if (p.side == Side::Plus) return 2;
    fail(ErrorCode::SideRequired, "evaluation at the discontinuity needs a side");
}

int pl_piece(const PLData& d, SidedPoint p) {
    int nu1 = int(d.slopes.size());
    require(p.x >= d.c.front() - 1e-9 && p.x <= d.c.back() + 1e-9,
            ErrorCode::DomainError, "point outside [-1, 1]");
    // Interior turning point: the side picks the piece.
    for (int i = 1; i < nu1; ++i) {
        if (p.x == d.c[i]) {
            if (p.side == Side::Minus) return i;
            if (p.side == Side::Plus) return i + 1;
            return i;
        }
    }
    int i = int(std::upper_bound(d.c.begin() + 1, d.c.end() - 1, p.x) -
                d.c.begin());
    return std::min(i, nu1);
}

double arnold_value(int d, double a, double b, double x) {
    return d * x + a + b * std::sin(kTwoPi * x);
}

}  // namespace

// ---------------------------------------------------------------------------
// Family
// ---------------------------------------------------------------------------

Family::Family(FamilyShape shape) : shape_(std::move(shape)) {
    if (auto* s = std::get_if<PowerUnimodalShape>(&shape_)) {
        kind_ = Kind::PowerUnimodal;
        require(s->d >= 2 && s->d % 2 == 0, ErrorCode::InvalidArgument,
                "power degree must be an even integer >= 2");
    } else if (auto* s = std::get_if<PowerLawShape>(&shape_)) {
        kind_ = Kind::PowerLaw;
        require(s->ell_minus >= 1 && s->ell_plus >= 1,
                ErrorCode::InvalidArgument, "power-law exponents must be >= 1");
    } else if (auto* s = std::get_if<FlatExpShape>(&shape_)) {
        kind_ = Kind::FlatExp;
        require(s->ell >= 1, ErrorCode::InvalidArgument, "ell must be >= 1");
        require(s->b > 2.0 * std::pow(std::exp(1.0) * s->ell, 1.0 / s->ell),
                ErrorCode::InvalidArgument,
                "flat family needs b > 2(e*ell)^(1/ell)");
    } else if (std::get_if<ClassEShape>(&shape_)) {
        kind_ = Kind::MultiplicativeClassE;
    } else if (auto* s = std::get_if<PiecewiseLinearShape>(&shape_)) {
        kind_ = Kind::PiecewiseLinear;
        require(s->nu >= 1, ErrorCode::InvalidArgument, "nu must be >= 1");
        require(int(s->kappa.size()) == s->nu + 1, ErrorCode::InvalidArgument,
                "kappa must have nu+1 entries");
        for (double k : s->kappa)
            require(k > 0, ErrorCode::InvalidArgument, "kappa must be > 0");
        require(s->eps == 1 || s->eps == -1, ErrorCode::InvalidArgument,
                "eps must be +1 or -1");
    } else if (std::get_if<LorenzAffineShape>(&shape_)) {
        kind_ = Kind::LorenzAffine;
    } else if (auto* s = std::get_if<LorenzFlatShape>(&shape_)) {
        kind_ = Kind::LorenzFlat;
        require(s->ell >= 1, ErrorCode::InvalidArgument, "ell must be >= 1");
        require(s->b > 2.0 * std::pow(std::exp(1.0) * s->ell, 1.0 / s->ell),
                ErrorCode::InvalidArgument,
                "flat Lorenz family needs b > 2(e*ell)^(1/ell)");
    } else if (auto* s = std::get_if<ArnoldShape>(&shape_)) {
        kind_ = Kind::Arnold;
        require(s->d >= 1, ErrorCode::InvalidArgument, "d must be >= 1");
    }
}

std::string Family::name() const {
    switch (kind_) {
        case Kind::PowerUnimodal: return "power_unimodal";
        case Kind::PowerLaw: return "power_law";
        case Kind::FlatExp: return "flat_exp";
        case Kind::MultiplicativeClassE: return "class_e";
        case Kind::PiecewiseLinear: return "piecewise_linear";
        case Kind::LorenzAffine: return "lorenz_affine";
        case Kind::LorenzFlat: return "lorenz_flat";
        case Kind::Arnold: return "arnold";
    }
    return "?";
}

int Family::param_dim() const {
    switch (kind_) {
        case Kind::PiecewiseLinear:
            return std::get<PiecewiseLinearShape>(shape_).nu;
        case Kind::LorenzAffine:
        case Kind::LorenzFlat:
        case Kind::Arnold:
            return 2;
        default:
            return 1;
    }
}

void Family::check_params(const Params& params) const {
    require(int(params.size()) == param_dim(), ErrorCode::InvalidArgument,
            "parameter vector has wrong length");
    switch (kind_) {
        case Kind::LorenzAffine:
            require(params[0] > 1.0 && params[0] <= 2.0,
                    ErrorCode::InvalidArgument, "t must lie in (1, 2]");
            require(std::abs(params[1]) < 1.0, ErrorCode::InvalidArgument,
                    "c must lie in (-1, 1)");
            break;
        case Kind::LorenzFlat:
            require(params[1] < 0.0 && params[0] > 0.0,
                    ErrorCode::InvalidArgument, "need c2 < 0 < c1");
            break;
        case Kind::MultiplicativeClassE: {
            const auto& core = std::get<ClassEShape>(shape_).core;
            require(params[0] > 0.0, ErrorCode::InvalidArgument, "need a > 0");
            if (std::isfinite(core.unimodal_end()))
                require(params[0] < core.unimodal_end(),
                        ErrorCode::InvalidArgument, "need a < b");
            break;
        }
        case Kind::Arnold: {
            int d = std::get<ArnoldShape>(shape_).d;
            require(std::abs(params[1]) > d / kTwoPi,
                    ErrorCode::InvalidArgument,
                    "Arnold family needs |b| > d/(2*pi) for critical points");
            break;
        }
        default:
            break;
    }
}

double Family::eval(const Params& params, SidedPoint p) const {
    check_params(params);
    switch (kind_) {
        case Kind::PowerUnimodal: {
            int d = std::get<PowerUnimodalShape>(shape_).d;
            return std::pow(std::abs(p.x), double(d)) + params[0];
        }
        case Kind::PowerLaw: {
            const auto& s = std::get<PowerLawShape>(shape_);
            double ell = p.x <= 0 ? s.ell_minus : s.ell_plus;
            return std::pow(std::abs(p.x), ell) + params[0];
        }
        case Kind::FlatExp: {
            const auto& s = std::get<FlatExpShape>(shape_);
            return flat_exp_value(s.ell, s.b, p.x) + params[0];
        }
        case Kind::MultiplicativeClassE: {
            const auto& core = std::get<ClassEShape>(shape_).core;
            return params[0] * core.value(p.x);
        }
        case Kind::PiecewiseLinear: {
            const auto& s = std::get<PiecewiseLinearShape>(shape_);
            PLData d = pl_data(s, params);
            int i = pl_piece(d, p);
            return d.values[i - 1] + d.slopes[i - 1] * (p.x - d.c[i - 1]);
        }
        case Kind::LorenzAffine: {
            double t = params[0], c = params[1];
            require(std::abs(p.x) <= 1.0 + 1e-12, ErrorCode::DomainError,
                    "point outside [-1, 1]");
            return lorenz_branch(c, p) == 1 ? t * p.x + (t - 1)
                                            : t * p.x - (t - 1);
        }
        case Kind::LorenzFlat: {
            const auto& s = std::get<LorenzFlatShape>(shape_);
            if (lorenz_branch(0.0, p) == 1)
                return -flat_exp_value(s.ell, s.b, p.x) + params[0];
            return flat_exp_value(s.ell, s.b, p.x) + params[1];
        }
        case Kind::Arnold: {
            int d = std::get<ArnoldShape>(shape_).d;
            double y = arnold_value(d, params[0], params[1], p.x);
            return y - std::floor(y);
        }
    }
    return 0.0;
}

double Family::eval_raw(const Params& params, SidedPoint p) const {
    if (kind_ == Kind::Arnold) {
        check_params(params);
        int d = std::get<ArnoldShape>(shape_).d;
        return arnold_value(d, params[0], params[1], p.x);
    }
    return eval(params, p);
}

double Family::d_dx(const Params& params, SidedPoint p) const {
    check_params(params);
    switch (kind_) {
        case Kind::PowerUnimodal: {
            int d = std::get<PowerUnimodalShape>(shape_).d;
            double v = d * std::pow(std::abs(p.x), double(d - 1));
            return p.x >= 0 ? v : -v;
        }
        case Kind::PowerLaw: {
            const auto& s = std::get<PowerLawShape>(shape_);
            if (p.x == 0.0) {
                if (p.side == Side::Minus) {
                    require(s.ell_minus >= 2, ErrorCode::NonDifferentiable,
                            "cusp at the turning point");
                    return 0.0;
                }
                if (p.side == Side::Plus) {
                    require(s.ell_plus >= 2, ErrorCode::NonDifferentiable,
                            "cusp at the turning point");
                    return 0.0;
                }
                require(std::min(s.ell_minus, s.ell_plus) >= 2,
                        ErrorCode::NonDifferentiable,
                        "cusp at the turning point");
                return 0.0;
            }
            double ell = p.x < 0 ? s.ell_minus : s.ell_plus;
            double v = ell * std::pow(std::abs(p.x), ell - 1);
            return p.x > 0 ? v : -v;
        }
        case Kind::FlatExp: {
            const auto& s = std::get<FlatExpShape>(shape_);
            return flat_exp_deriv(s.ell, s.b, p.x);
        }
        case Kind::MultiplicativeClassE: {
            const auto& core = std::get<ClassEShape>(shape_).core;
            return params[0] * core.deriv(p.x);
        }
        case Kind::PiecewiseLinear: {
            const auto& s = std::get<PiecewiseLinearShape>(shape_);
            PLData d = pl_data(s, params);
            for (int i = 1; i <= s.nu; ++i)
                require(p.x != d.c[i] || p.side != Side::TwoSided,
                        ErrorCode::NonDifferentiable,
                        "turning point needs a side");
            return d.slopes[pl_piece(d, p) - 1];
        }
        case Kind::LorenzAffine:
            return params[0];
        case Kind::LorenzFlat: {
            const auto& s = std::get<LorenzFlatShape>(shape_);
            double v = flat_exp_deriv(s.ell, s.b, p.x);
            return lorenz_branch(0.0, p) == 1 ? -v : v;
        }
        case Kind::Arnold: {
            int d = std::get<ArnoldShape>(shape_).d;
            return d + kTwoPi * params[1] * std::cos(kTwoPi * p.x);
        }
    }
    return 0.0;
}

std::vector<double> Family::d_dparam(const Params& params, SidedPoint p) const {
    check_params(params);
    switch (kind_) {
        case Kind::PowerUnimodal:
        case Kind::PowerLaw:
        case Kind::FlatExp:
            return {1.0};
        case Kind::MultiplicativeClassE: {
            const auto& core = std::get<ClassEShape>(shape_).core;
            return {core.value(p.x)};
        }
        case Kind::PiecewiseLinear: {
            // d/dv_k of the map at fixed x, matching the deformation dG_dw
            // restricted to real values.
            auto def = deformation(params);
            CVec w(params.begin(), params.end());
            CVec g = def->dG_dw(w, Complex(p.x, 0.0), branch_at(params, p));
            std::vector<double> out(g.size());
            for (size_t k = 0; k < g.size(); ++k) out[k] = g[k].real();
            return out;
        }
        case Kind::LorenzAffine: {
            int br = lorenz_branch(params[1], p);
            return {br == 1 ? p.x + 1.0 : p.x - 1.0, 0.0};
        }
        case Kind::LorenzFlat:
            return lorenz_branch(0.0, p) == 1 ? std::vector<double>{1.0, 0.0}
                                              : std::vector<double>{0.0, 1.0};
        case Kind::Arnold:
            return {1.0, std::sin(kTwoPi * p.x)};
    }
    return {};
}

int Family::branch_at(const Params& params, SidedPoint p) const {
    switch (kind_) {
        case Kind::PowerUnimodal:
        case Kind::MultiplicativeClassE:
        case Kind::Arnold:
            return 0;
        case Kind::PowerLaw:
        case Kind::FlatExp:
            if (p.x < 0 || (p.x == 0 && p.side == Side::Minus)) return -1;
            return 1;
        case Kind::PiecewiseLinear: {
            PLData d = pl_data(std::get<PiecewiseLinearShape>(shape_), params);
            return pl_piece(d, p);
        }
        case Kind::LorenzAffine:
            return lorenz_branch(params[1], p);
        case Kind::LorenzFlat:
            return lorenz_branch(0.0, p);
    }
    return 0;
}

std::optional<double> Family::symbolic_center(const Params& params) const {
    switch (kind_) {
        case Kind::PowerUnimodal:
        case Kind::PowerLaw:
        case Kind::FlatExp:
        case Kind::LorenzFlat:
            return 0.0;
        case Kind::MultiplicativeClassE:
            return std::get<ClassEShape>(shape_).core.crit();
        case Kind::LorenzAffine:
            return params[1];
        case Kind::PiecewiseLinear: {
            const auto& s = std::get<PiecewiseLinearShape>(shape_);
            if (s.nu != 1) return std::nullopt;
            return pl_data(s, params).c[1];
        }
        case Kind::Arnold:
            return std::nullopt;
    }
    return std::nullopt;
}

double Family::escape_bound(const Params& params) const {
    switch (kind_) {
        case Kind::PowerUnimodal:
        case Kind::PowerLaw: {
            // Largest positive fixed point of |x|^ell + c; beyond it the
            // orbit increases monotonically to infinity.
            double ell = kind_ == Kind::PowerUnimodal
                             ? double(std::get<PowerUnimodalShape>(shape_).d)
                             : std::get<PowerLawShape>(shape_).ell_plus;
            double c = params[0];
            auto g = [&](double x) { return std::pow(x, ell) + c - x; };
            double xm = std::pow(1.0 / ell, 1.0 / (ell - 1.0));
            if (g(xm) > 0) return 1e8;  // no fixed point; escape immediately
            double hi = std::max(2.0 * xm, 2.0);
            while (g(hi) <= 0) hi *= 2.0;
            double xf = bisect(g, xm, hi);
            return xf * (1.0 + 1e-9) + 1e-9;
        }
        case Kind::FlatExp:
        case Kind::Arnold:
            return std::numeric_limits<double>::infinity();
        case Kind::MultiplicativeClassE: {
            const auto& core = std::get<ClassEShape>(shape_).core;
            return core.unimodal_end();
        }
        case Kind::PiecewiseLinear:
        case Kind::LorenzAffine:
        case Kind::LorenzFlat:
            return 1.0 + 1e-9;
    }
    return std::numeric_limits<double>::infinity();
}

double Family::default_closure_tol() const {
    return (kind_ == Kind::FlatExp || kind_ == Kind::LorenzFlat) ? 1e-7 : 1e-9;
}

std::vector<CriticalData> Family::critical_data(const Params& params) const {
    check_params(params);
    switch (kind_) {
        case Kind::PowerUnimodal: {
            double d = std::get<PowerUnimodalShape>(shape_).d;
            return {{at(0.0), params[0], d, d, false}};
        }
        case Kind::PowerLaw: {
            const auto& s = std::get<PowerLawShape>(shape_);
            return {{at(0.0), params[0], s.ell_minus, s.ell_plus, false}};
        }
        case Kind::FlatExp: {
            double inf = std::numeric_limits<double>::infinity();
            return {{at(0.0), params[0], inf, inf, true}};
        }
        case Kind::MultiplicativeClassE: {
            const auto& core = std::get<ClassEShape>(shape_).core;
            double c = core.crit();
            return {{at(c), params[0] * core.value(c), 2.0, 2.0, false}};
        }
        case Kind::PiecewiseLinear: {
            const auto& s = std::get<PiecewiseLinearShape>(shape_);
            PLData d = pl_data(s, params);
            std::vector<CriticalData> out;
            for (int j = 1; j <= s.nu; ++j)
                out.push_back({at(d.c[j]), d.values[j], 1.0, 1.0, false});
            return out;
        }
        case Kind::LorenzAffine: {
            double t = params[0], c = params[1];
            return {{at_minus(c), t * c + (t - 1), 1.0, 1.0, false},
                    {at_plus(c), t * c - (t - 1), 1.0, 1.0, false}};
        }
        case Kind::LorenzFlat: {
            double inf = std::numeric_limits<double>::infinity();
            return {{at_minus(0.0), params[0], inf, inf, true},
                    {at_plus(0.0), params[1], inf, inf, true}};
        }
        case Kind::Arnold: {
            int d = std::get<ArnoldShape>(shape_).d;
            double a = params[0], b = params[1];
            double e1 = std::acos(-d / (kTwoPi * b)) / kTwoPi;
            double e2 = 1.0 - e1;
            return {{at(e1), arnold_value(d, a, b, e1), 2.0, 2.0, false},
                    {at(e2), arnold_value(d, a, b, e2), 2.0, 2.0, false}};
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Deformations
// ---------------------------------------------------------------------------

Complex Deformation::invert(const CVec& w, Complex target, int branch,
                            Complex seed) const {
    Complex z = seed;
    for (int it = 0; it < 100; ++it) {
        Complex g = G(w, z, branch);
        Complex dg = dG_dz(w, z, branch);
        require(std::abs(dg) >= 1e-12, ErrorCode::SingularLift,
                "dG/dz vanished while inverting");
        Complex step = (g - target) / dg;
        z -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) return z;
    }
    fail(ErrorCode::NoConvergence, "inverse Newton iteration stalled");
}

namespace {

/// Additive one-critical-point deformation G_w(z) = g0(z) + w with the marked
/// point pinned at 0.
class AdditiveDeformation final : public Deformation {
public:
    AdditiveDeformation(Kind kind, FamilyShape shape, double c)
        : kind_(kind), shape_(std::move(shape)) {
        base_ = {Complex(c, 0.0)};
    }

    Complex shape_value(Complex z, int branch) const {
        switch (kind_) {
            case Kind::PowerUnimodal: {
                int d = std::get<PowerUnimodalShape>(shape_).d;
                Complex v = 1.0;
                for (int i = 0; i < d; ++i) v *= z;
                return v;
            }
            case Kind::PowerLaw: {
                const auto& s = std::get<PowerLawShape>(shape_);
                return branch < 0 ? std::pow(-z, s.ell_minus)
                                  : std::pow(z, s.ell_plus);
            }
            case Kind::FlatExp: {
                const auto& s = std::get<FlatExpShape>(shape_);
                Complex u = branch < 0 ? -z : z;
                return s.b * std::exp(-std::pow(u, -s.ell));
            }
            default:
                fail(ErrorCode::Unsupported, "not an additive kind");
        }
    }

    Complex shape_deriv(Complex z, int branch) const {
        switch (kind_) {
            case Kind::PowerUnimodal: {
                int d = std::get<PowerUnimodalShape>(shape_).d;
                Complex v = double(d);
                for (int i = 0; i < d - 1; ++i) v *= z;
                return v;
            }
            case Kind::PowerLaw: {
                const auto& s = std::get<PowerLawShape>(shape_);
                if (branch < 0)
                    return -s.ell_minus * std::pow(-z, s.ell_minus - 1);
                return s.ell_plus * std::pow(z, s.ell_plus - 1);
            }
            case Kind::FlatExp: {
                const auto& s = std::get<FlatExpShape>(shape_);
                Complex u = branch < 0 ? -z : z;
                Complex v = s.b * std::exp(-std::pow(u, -s.ell)) * s.ell *
                            std::pow(u, -s.ell - 1.0);
                return branch < 0 ? -v : v;
            }
            default:
                fail(ErrorCode::Unsupported, "not an additive kind");
        }
    }

    Complex G(const CVec& w, Complex z, int branch) const override {
        return shape_value(z, branch) + w[0];
    }
    Complex dG_dz(const CVec& w, Complex z, int branch) const override {
        (void)w;
        return shape_deriv(z, branch);
    }
    CVec dG_dw(const CVec&, Complex, int) const override {
        return {Complex(1.0, 0.0)};
    }
    Complex p(const CVec&, int) const override { return 0.0; }
    CVec dp_dw(const CVec&, int) const override {
        return {Complex(0.0, 0.0)};
    }

    bool closed_form_inverse() const override {
        return kind_ == Kind::PowerLaw;
    }
    Complex invert(const CVec& w, Complex target, int branch,
                   Complex seed) const override {
        if (kind_ == Kind::PowerLaw) {
            const auto& s = std::get<PowerLawShape>(shape_);
            // Principal branch normalised by 1^t = 1.
            if (branch < 0)
                return -std::pow(target - w[0], 1.0 / s.ell_minus);
            return std::pow(target - w[0], 1.0 / s.ell_plus);
        }
        return Deformation::invert(w, target, branch, seed);
    }

private:
    Kind kind_;
    FamilyShape shape_;
};

class MultiplicativeDeformation final : public Deformation {
public:
    MultiplicativeDeformation(CoreMap core, double a) : core_(std::move(core)) {
        base_ = {Complex(a, 0.0)};
    }

    Complex G(const CVec& w, Complex z, int) const override {
        return w[0] * core_.value(z);
    }
    Complex dG_dz(const CVec& w, Complex z, int) const override {
        return w[0] * core_.deriv(z);
    }
    CVec dG_dw(const CVec&, Complex z, int) const override {
        return {core_.value(z)};
    }
    Complex p(const CVec&, int) const override {
        return Complex(core_.crit(), 0.0);
    }
    CVec dp_dw(const CVec&, int) const override {
        return {Complex(0.0, 0.0)};
    }

private:
    CoreMap core_;
};

class PLDeformation final : public Deformation {
public:
    PLDeformation(PiecewiseLinearShape shape, const Params& v)
        : shape_(std::move(shape)) {
        base_.assign(v.begin(), v.end());
    }

    double eps_i(int i) const { return (i % 2 == 1) ? shape_.eps : -shape_.eps; }
    double kappa(int i) const { return shape_.kappa[i - 1]; }

    Complex w_at(const CVec& w, int i) const {
        if (i == 0) return Complex(-eps_i(1), 0.0);
        if (i == shape_.nu + 1) return Complex(eps_i(shape_.nu + 1), 0.0);
        return w[i - 1];
    }

    Complex S(const CVec& w) const {
        Complex s = 0.0;
        for (int i = 1; i <= shape_.nu + 1; ++i)
            s += (w_at(w, i) - w_at(w, i - 1)) * (eps_i(i) / (2.0 * kappa(i)));
        return s;
    }
    double dS_dw(int k) const {
        return eps_i(k) / (2.0 * kappa(k)) - eps_i(k + 1) / (2.0 * kappa(k + 1));
    }
    Complex N(const CVec& w, int j) const {
        Complex n = 0.0;
        for (int i = 1; i <= j; ++i)
            n += (w_at(w, i) - w_at(w, i - 1)) * (eps_i(i) / kappa(i));
        return n;
    }
    double dN_dw(int j, int k) const {
        double v = 0.0;
        if (k <= j) v += eps_i(k) / kappa(k);
        if (k + 1 <= j) v -= eps_i(k + 1) / kappa(k + 1);
        return v;
    }

    // Turning points in the construction's own numbering: point_0 = -1 and
    // point_i = -1 + N_i / S for i = 1..nu.
    Complex point(const CVec& w, int i) const {
        if (i == 0) return Complex(-1.0, 0.0);
        return -1.0 + N(w, i) / S(w);
    }
    CVec dpoint_dw(const CVec& w, int i) const {
        CVec out(shape_.nu, Complex(0.0, 0.0));
        if (i == 0) return out;
        Complex s = S(w), n = N(w, i);
        for (int k = 1; k <= shape_.nu; ++k)
            out[k - 1] = (dN_dw(i, k) * s - n * dS_dw(k)) / (s * s);
        return out;
    }

    Complex p(const CVec& w, int j) const override { return point(w, j + 1); }
    CVec dp_dw(const CVec& w, int j) const override {
        return dpoint_dw(w, j + 1);
    }

    Complex G(const CVec& w, Complex z, int branch) const override {
        return w_at(w, branch - 1) +
               kappa(branch) * eps_i(branch) * S(w) * (z - point(w, branch - 1));
    }
    Complex dG_dz(const CVec& w, Complex, int branch) const override {
        return kappa(branch) * eps_i(branch) * S(w);
    }
    CVec dG_dw(const CVec& w, Complex z, int branch) const override {
        CVec out(shape_.nu, Complex(0.0, 0.0));
        Complex s = S(w);
        Complex pj = point(w, branch - 1);
        CVec dpj = dpoint_dw(w, branch - 1);
        double ke = kappa(branch) * eps_i(branch);
        for (int k = 1; k <= shape_.nu; ++k) {
            Complex v = ke * (dS_dw(k) * (z - pj) - s * dpj[k - 1]);
            if (branch - 1 == k) v += 1.0;
            out[k - 1] = v;
        }
        return out;
    }

private:
    PiecewiseLinearShape shape_;
};

class LorenzAffineDeformation final : public Deformation {
public:
    LorenzAffineDeformation(double t, double c) {
        base_ = {Complex(t * c + (t - 1), 0.0), Complex(t * c - (t - 1), 0.0)};
    }

    static Complex t_of(const CVec& w) { return 1.0 + 0.5 * (w[0] - w[1]); }

    Complex G(const CVec& w, Complex z, int branch) const override {
        Complex t = t_of(w);
        return branch == 1 ? t * z + (t - 1.0) : t * z - (t - 1.0);
    }
    Complex dG_dz(const CVec& w, Complex, int) const override {
        return t_of(w);
    }
    CVec dG_dw(const CVec&, Complex z, int branch) const override {
        Complex dt = branch == 1 ? (z + 1.0) * 0.5 : (z - 1.0) * 0.5;
        return {dt, -dt};
    }
    Complex p(const CVec& w, int) const override {
        return (w[0] + w[1]) / (2.0 * t_of(w));
    }
    CVec dp_dw(const CVec& w, int) const override {
        Complex t = t_of(w);
        Complex sum = w[0] + w[1];
        return {1.0 / (2.0 * t) - sum / (4.0 * t * t),
                1.0 / (2.0 * t) + sum / (4.0 * t * t)};
    }
};

class LorenzFlatDeformation final : public Deformation {
public:
    LorenzFlatDeformation(LorenzFlatShape shape, double c1, double c2)
        : shape_(shape) {
        base_ = {Complex(c1, 0.0), Complex(c2, 0.0)};
    }

    Complex G(const CVec& w, Complex z, int branch) const override {
        Complex u = branch == 1 ? -z : z;
        Complex e = shape_.b * std::exp(-std::pow(u, -shape_.ell));
        return branch == 1 ? -e + w[0] : e + w[1];
    }
    Complex dG_dz(const CVec&, Complex z, int branch) const override {
        Complex u = branch == 1 ? -z : z;
        Complex v = shape_.b * std::exp(-std::pow(u, -shape_.ell)) * shape_.ell *
                    std::pow(u, -shape_.ell - 1.0);
        return v;  // both branches are increasing
    }
    CVec dG_dw(const CVec&, Complex, int branch) const override {
        return branch == 1 ? CVec{1.0, 0.0} : CVec{0.0, 1.0};
    }
    Complex p(const CVec&, int) const override { return 0.0; }
    CVec dp_dw(const CVec&, int) const override { return {0.0, 0.0}; }

private:
    LorenzFlatShape shape_;
};

class ArnoldDeformation final : public Deformation {
public:
    ArnoldDeformation(int d, double a0, double b0) : d_(d), a0_(a0), b0_(b0) {
        double e1 = std::acos(-d / (kTwoPi * b0)) / kTwoPi;
        require(std::abs(std::sin(kTwoPi * e1)) > 1e-12,
                ErrorCode::DegenerateDeformation,
                "critical points of the circle map are degenerate");
        base_ = {Complex(arnold_value(d, a0, b0, e1), 0.0),
                 Complex(arnold_value(d, a0, b0, 1.0 - e1), 0.0)};
    }

    Complex e1_of(Complex b) const {
        return std::acos(-double(d_) / (kTwoPi * b)) / kTwoPi;
    }

    struct Chart {
        Complex a, b, e1, e2, sin1;
    };

    Chart chart(const CVec& w) const {
        // One complex Newton solve for b; a follows explicitly.
        Complex b = Complex(b0_, 0.0);
        for (int it = 0; it < 60; ++it) {
            Complex e1 = e1_of(b);
            Complex e2 = 1.0 - e1;
            Complex s1 = std::sin(kTwoPi * e1);
            Complex phi =
                double(d_) * (e2 - e1) + b * (std::sin(kTwoPi * e2) - s1) -
                (w[1] - w[0]);
            Complex step = phi / (-2.0 * s1);
            b -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(b))) break;
        }
        Chart ch;
        ch.b = b;
        ch.e1 = e1_of(b);
        ch.e2 = 1.0 - ch.e1;
        ch.sin1 = std::sin(kTwoPi * ch.e1);
        require(std::abs(ch.sin1) > 1e-12, ErrorCode::DegenerateDeformation,
                "chart Jacobian is singular");
        ch.a = w[0] - double(d_) * ch.e1 - b * ch.sin1;
        return ch;
    }

    Complex G(const CVec& w, Complex z, int) const override {
        Chart ch = chart(w);
        return double(d_) * z + ch.a + ch.b * std::sin(kTwoPi * z);
    }
    Complex dG_dz(const CVec& w, Complex z, int) const override {
        Chart ch = chart(w);
        return double(d_) + kTwoPi * ch.b * std::cos(kTwoPi * z);
    }
    CVec dG_dw(const CVec& w, Complex z, int) const override {
        Chart ch = chart(w);
        Complex db1 = 1.0 / (2.0 * ch.sin1);
        Complex sz = std::sin(kTwoPi * z);
        return {0.5 + sz * db1, 0.5 - sz * db1};
    }
    Complex p(const CVec& w, int j) const override {
        Chart ch = chart(w);
        return j == 1 ? ch.e2 : ch.e1;
    }
    CVec dp_dw(const CVec& w, int j) const override {
        Chart ch = chart(w);
        Complex de1 = -double(d_) / (4.0 * kPi * kPi * ch.b * ch.b * ch.sin1);
        Complex db1 = 1.0 / (2.0 * ch.sin1);
        Complex d1 = de1 * db1;
        if (j == 1) return {-d1, d1};  // e2 = 1 - e1
        return {d1, -d1};
    }

private:
    int d_;
    double a0_, b0_;
};

}  // namespace

std::shared_ptr<const Deformation> Family::deformation(
    const Params& params) const {
    check_params(params);
    switch (kind_) {
        case Kind::PowerUnimodal:
        case Kind::PowerLaw:
        case Kind::FlatExp:
            return std::make_shared<AdditiveDeformation>(kind_, shape_,
                                                         params[0]);
        case Kind::MultiplicativeClassE:
            return std::make_shared<MultiplicativeDeformation>(
                std::get<ClassEShape>(shape_).core, params[0]);
        case Kind::PiecewiseLinear: {
            const auto& s = std::get<PiecewiseLinearShape>(shape_);
            pl_data(s, params);  // validates the value vector
            return std::make_shared<PLDeformation>(s, params);
        }
        case Kind::LorenzAffine:
            return std::make_shared<LorenzAffineDeformation>(params[0],
                                                             params[1]);
        case Kind::LorenzFlat:
            return std::make_shared<LorenzFlatDeformation>(
                std::get<LorenzFlatShape>(shape_), params[0], params[1]);
        case Kind::Arnold:
            return std::make_shared<ArnoldDeformation>(
                std::get<ArnoldShape>(shape_).d, params[0], params[1]);
    }
    fail(ErrorCode::Unsupported, "no deformation for this kind");
}

double flat_exp_beta(double ell, double b) { return flat_beta(ell, b); }

}  // namespace kneadlab
