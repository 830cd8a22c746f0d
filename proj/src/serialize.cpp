#include "kneadlab/serialize.hpp"

namespace kneadlab {

std::pair<Family, Params> family_from_json(const Json& j) {
    std::string kind = j.at("kind").get<std::string>();
    Json shape = j.value("shape", Json::object());
    FamilyShape fs;
    if (kind == "power_unimodal") {
        fs = PowerUnimodalShape{shape.value("d", 2)};
    } else if (kind == "power_law") {
        fs = PowerLawShape{shape.value("ell_minus", 2.0),
                           shape.value("ell_plus", 2.0)};
    } else if (kind == "flat_exp") {
        fs = FlatExpShape{shape.value("ell", 1.0), shape.value("b", 6.0)};
    } else if (kind == "class_e") {
        fs = ClassEShape{CoreMap::builtin(shape.value("core", "sin"),
                                          shape.value("m", 3))};
    } else if (kind == "piecewise_linear") {
        fs = PiecewiseLinearShape{
            shape.value("epsilon", 1), shape.value("nu", 1),
            shape.value("kappa", std::vector<double>{1.0, 1.0})};
    } else if (kind == "lorenz_affine") {
        fs = LorenzAffineShape{};
    } else if (kind == "lorenz_flat") {
        fs = LorenzFlatShape{shape.value("ell", 1.0), shape.value("b", 6.0)};
    } else if (kind == "arnold") {
        fs = ArnoldShape{shape.value("d", 1)};
    } else {
        fail(ErrorCode::InvalidArgument, "unknown family kind '" + kind + "'");
    }
    Family family(fs);
    Params params = j.value("params", Params{});
    return {std::move(family), std::move(params)};
}

Json family_to_json(const Family& family, const Params& params) {
    Json shape = Json::object();
    switch (family.kind()) {
        case Kind::PowerUnimodal:
            shape["d"] = std::get<PowerUnimodalShape>(family.shape()).d;
            break;
        case Kind::PowerLaw: {
            const auto& s = std::get<PowerLawShape>(family.shape());
            shape["ell_minus"] = s.ell_minus;
            shape["ell_plus"] = s.ell_plus;
            break;
        }
        case Kind::FlatExp: {
            const auto& s = std::get<FlatExpShape>(family.shape());
            shape["ell"] = s.ell;
            shape["b"] = s.b;
            break;
        }
        case Kind::MultiplicativeClassE: {
            const auto& core = std::get<ClassEShape>(family.shape()).core;
            shape["core"] = core.name();
            break;
        }
        case Kind::PiecewiseLinear: {
            const auto& s = std::get<PiecewiseLinearShape>(family.shape());
            shape["epsilon"] = s.eps;
            shape["nu"] = s.nu;
            shape["kappa"] = s.kappa;
            break;
        }
        case Kind::LorenzAffine:
            break;
        case Kind::LorenzFlat: {
            const auto& s = std::get<LorenzFlatShape>(family.shape());
            shape["ell"] = s.ell;
            shape["b"] = s.b;
            break;
        }
        case Kind::Arnold:
            shape["d"] = std::get<ArnoldShape>(family.shape()).d;
            break;
    }
    Json j;
    j["kind"] = family.name();
    j["shape"] = shape;
    j["params"] = params;
    return j;
}

Json motion_to_json(const MotionGrid& grid) {
    Json j;
    j["points"] = grid.base;
    j["radii"] = grid.radii;
    j["rays"] = grid.rays();
    j["real_mode"] = grid.real_mode;
    Json re = Json::array(), im = Json::array();
    for (int p = 0; p < grid.points(); ++p) {
        Json rp = Json::array(), ip = Json::array();
        for (int m = 0; m < grid.rays(); ++m) {
            Json rr = Json::array(), ir = Json::array();
            for (int k = 0; k < grid.nradii(); ++k) {
                rr.push_back(grid.values[p][m][k].real());
                ir.push_back(grid.values[p][m][k].imag());
            }
            rp.push_back(rr);
            ip.push_back(ir);
        }
        re.push_back(rp);
        im.push_back(ip);
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

MotionGrid motion_from_json(const Json& j) {
    MotionGrid g;
    g.base = j.at("points").get<std::vector<double>>();
    g.radii = j.at("radii").get<std::vector<double>>();
    int rays = j.at("rays").get<int>();
    g.real_mode = j.value("real_mode", false);
    g.angles.resize(rays);
    for (int m = 0; m < rays; ++m)
        g.angles[m] = 2.0 * 3.14159265358979323846 * double(m) / double(rays);
    const Json& re = j.at("re");
    const Json& im = j.at("im");
    g.values.assign(g.base.size(),
                    std::vector<std::vector<Complex>>(
                        rays, std::vector<Complex>(g.radii.size())));
    for (size_t p = 0; p < g.base.size(); ++p)
        for (int m = 0; m < rays; ++m)
            for (size_t k = 0; k < g.radii.size(); ++k)
                g.values[p][m][k] =
                    Complex(re[p][m][k].get<double>(), im[p][m][k].get<double>());
    return g;
}

}  // namespace kneadlab
