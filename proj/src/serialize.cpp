#include "maiv/serialize.hpp"

#include "maiv/error.hpp"

namespace maiv {

using nlohmann::json;

json to_json(const KeyframeSet& keys) {
  return json{{"T", keys.source_length()}, {"indices", keys.indices()}};
}

KeyframeSet keyframes_from_json(const json& j) {
  try {
    return KeyframeSet(j.at("indices").get<std::vector<std::size_t>>(),
                       j.at("T").get<std::size_t>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("key-frame JSON: ") + e.what());
  }
}

json to_json(const MotionField& field) {
  json vectors = json::array();
  for (const MotionVector& v : field.vectors) vectors.push_back({v.dx, v.dy});
  return json{{"block_size", field.block_size},
              {"grid_w", field.grid_w},
              {"grid_h", field.grid_h},
              {"vectors", std::move(vectors)},
              {"costs", field.costs}};
}

MotionField motion_field_from_json(const json& j) {
  try {
    MotionField field;
    field.block_size = j.at("block_size").get<int>();
    field.grid_w = j.at("grid_w").get<int>();
    field.grid_h = j.at("grid_h").get<int>();
    for (const json& v : j.at("vectors")) {
      field.vectors.push_back({v.at(0).get<int>(), v.at(1).get<int>()});
    }
    field.costs = j.at("costs").get<std::vector<double>>();
    const auto blocks = static_cast<std::size_t>(field.grid_w) * static_cast<std::size_t>(field.grid_h);
    if (field.vectors.size() != blocks || field.costs.size() != blocks) {
      throw FormatError("motion field JSON: vector/cost count does not match the grid");
    }
    return field;
  } catch (const json::exception& e) {
    throw FormatError(std::string("motion field JSON: ") + e.what());
  }
}

json to_json(const CostReport& r) {
  return json{{"generator_macs", r.generator_macs},
              {"epzs_macs", r.epzs_macs},
              {"obmc_macs", r.obmc_macs},
              {"selector_macs", r.selector_macs},
              {"total_macs", r.total_macs},
              {"mean_macs_per_frame", r.mean_macs_per_frame()},
              {"mean_gmacs_per_frame", r.mean_macs_per_frame() / kGiga},
              {"frames_generated", r.frames_generated},
              {"frames_interpolated", r.frames_interpolated},
              {"gaps_estimated", r.gaps_estimated}};
}

}  // namespace maiv
