#pragma once

#include <json.hpp>

#include "kneadlab/motionlab.hpp"

namespace kneadlab {

using Json = nlohmann::ordered_json;

/// Parse {"kind": ..., "shape": {...}, "params": [...]}.
std::pair<Family, Params> family_from_json(const Json& j);
Json family_to_json(const Family& family, const Params& params);

Json motion_to_json(const MotionGrid& grid);
MotionGrid motion_from_json(const Json& j);

}  // namespace kneadlab
