#pragma once

#include <json.hpp>

#include "maiv/keyframe.hpp"
#include "maiv/metrics.hpp"
#include "maiv/motion.hpp"

namespace maiv {

// {"T": int, "indices": [int...]}
nlohmann::json to_json(const KeyframeSet& keys);
KeyframeSet keyframes_from_json(const nlohmann::json& j);

// {block_size, grid_w, grid_h, vectors: [[dx, dy]...], costs: [...]}
nlohmann::json to_json(const MotionField& field);
MotionField motion_field_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CostReport& report);

}  // namespace maiv
