#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kneadlab/common.hpp"

namespace kneadlab {

/// One of the built-in interval maps used by the multiplicative family
/// a*f(x): fixes f(0)=0, the only critical value on the unimodal part is 1
/// (or -1 for odd cores), attained at a positive critical point.
class CoreMap {
public:
    enum class Id { Sin, Logistic, ExpLogistic, SinSq, XmGauss };

    static CoreMap builtin(const std::string& name, int m = 3);

    double value(double x) const;
    double deriv(double x) const;
    Complex value(Complex z) const;
    Complex deriv(Complex z) const;

    Id id() const { return id_; }
    const std::string& name() const { return name_; }
    bool odd() const { return odd_; }
    /// Critical point of the unimodal part.
    double crit() const { return crit_; }
    /// Right end of the unimodal part [0, b); +inf when f stays positive.
    double unimodal_end() const { return b_; }

private:
    Id id_ = Id::Sin;
    std::string name_;
    int m_ = 3;
    bool odd_ = false;
    double crit_ = 0.0;
    double b_ = 0.0;
};

struct PowerUnimodalShape {
    int d = 2;
};
struct PowerLawShape {
    double ell_minus = 2.0;
    double ell_plus = 2.0;
};
struct FlatExpShape {
    double ell = 1.0;
    double b = 6.0;
};
struct ClassEShape {
    CoreMap core;
};
struct PiecewiseLinearShape {
    int eps = 1;                 // +1 or -1; branch i has slope sign (-1)^(i-1)*eps
    int nu = 1;                  // number of turning points
    std::vector<double> kappa;   // nu+1 positive slope weights
};
struct LorenzAffineShape {};
struct LorenzFlatShape {
    double ell = 1.0;
    double b = 6.0;
};
struct ArnoldShape {
    int d = 1;
};

using FamilyShape =
    std::variant<PowerUnimodalShape, PowerLawShape, FlatExpShape, ClassEShape,
                 PiecewiseLinearShape, LorenzAffineShape, LorenzFlatShape,
                 ArnoldShape>;

enum class Kind {
    PowerUnimodal,
    PowerLaw,
    FlatExp,
    MultiplicativeClassE,
    PiecewiseLinear,
    LorenzAffine,
    LorenzFlat,
    Arnold,
};

struct CriticalData {
    SidedPoint point;
    double value = 0.0;
    double order_left = 2.0;   // local degree approaching from the left
    double order_right = 2.0;  // and from the right
    bool flat = false;
};

using Params = std::vector<double>;
using CVec = std::vector<Complex>;

/// Local holomorphic deformation (G_w, p) of a parameterised map around a
/// base parameter: complex evaluators for G, its derivatives, and the moving
/// marked points p_j(w). `branch` selects the analytic branch attached to a
/// real orbit point (see Family::branch_at).
class Deformation {
public:
    virtual ~Deformation() = default;

    int nu() const { return int(base_.size()); }
    const CVec& base_w() const { return base_; }

    virtual Complex G(const CVec& w, Complex z, int branch) const = 0;
    virtual Complex dG_dz(const CVec& w, Complex z, int branch) const = 0;
    virtual CVec dG_dw(const CVec& w, Complex z, int branch) const = 0;
    /// Moving marked point j (0-based, in Family::critical_data order).
    virtual Complex p(const CVec& w, int j) const = 0;
    virtual CVec dp_dw(const CVec& w, int j) const = 0;

    /// Solve G_w(z) = target for z near `seed` on the given branch.
    virtual Complex invert(const CVec& w, Complex target, int branch,
                           Complex seed) const;
    virtual bool closed_form_inverse() const { return false; }

protected:
    CVec base_;
};

class Family {
public:
    explicit Family(FamilyShape shape);

    Kind kind() const { return kind_; }
    const FamilyShape& shape() const { return shape_; }
    std::string name() const;
    int param_dim() const;
    bool circle() const { return kind_ == Kind::Arnold; }

    double eval(const Params& params, SidedPoint p) const;
    /// Like eval, but circle kinds return the unreduced lift d*x + ...
    double eval_raw(const Params& params, SidedPoint p) const;
    double d_dx(const Params& params, SidedPoint p) const;
    std::vector<double> d_dparam(const Params& params, SidedPoint p) const;
    std::vector<CriticalData> critical_data(const Params& params) const;
    std::shared_ptr<const Deformation> deformation(const Params& params) const;

    /// Analytic branch attached to a real point (0 for entire kinds,
    /// -1/+1 for the two branches of |x|-type kinds, the piece index for
    /// piecewise-linear kinds, 1/2 for Lorenz kinds).
    int branch_at(const Params& params, SidedPoint p) const;

    /// Reference point for symbolic itineraries (turning point or
    /// discontinuity); empty when the kind has no single such point.
    std::optional<double> symbolic_center(const Params& params) const;

    /// |x| beyond this bound means the orbit has left the invariant region.
    double escape_bound(const Params& params) const;

    /// Kinds whose domain is a bounded interval; leaving it is an error.
    /// For the power kinds an escaping orbit runs to +infinity and keeps a
    /// well-defined symbol tail instead.
    bool bounded_domain() const {
        return kind_ == Kind::PiecewiseLinear || kind_ == Kind::LorenzAffine ||
               kind_ == Kind::LorenzFlat ||
               kind_ == Kind::MultiplicativeClassE;
    }

    /// Invariant domain interval for the bounded kinds ([-1,1], or the
    /// unimodal part [0, b) for the multiplicative kinds); (-inf, inf)
    /// otherwise.
    std::pair<double, double> domain_bounds() const {
        if (kind_ == Kind::MultiplicativeClassE) {
            const auto& core = std::get<ClassEShape>(shape_).core;
            return {-1e-9, core.unimodal_end()};
        }
        if (bounded_domain()) return {-1.0 - 1e-9, 1.0 + 1e-9};
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    }

    /// Orbit-closure tolerance default (flat kinds are worse conditioned).
    double default_closure_tol() const;

private:
    void check_params(const Params& params) const;

    Kind kind_;
    FamilyShape shape_;
};

/// Turning points and slopes of a piecewise-linear spec; see plmaps.
struct PLData {
    double s = 0.0;               // slope scale
    std::vector<double> c;        // nu+2 turning points, c[0]=-1, c[nu+1]=1
    std::vector<double> slopes;   // nu+1 signed branch slopes
    std::vector<double> values;   // nu+2 values at the c[i]
};

/// Solve the turning-point/slope data of a PL map from its extremal values.
PLData pl_data(const PiecewiseLinearShape& shape, const Params& values);

/// Solution beta of 2*x*exp(1/x^ell) = b on (0, ell^(1/ell)); the flat
/// families have fixed points at +-beta for the symmetric parameter.
double flat_exp_beta(double ell, double b);

}  // namespace kneadlab
