#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "maiv/core.hpp"
#include "maiv/motion.hpp"

namespace maiv {

enum class ObmcWindow { bilinear };

struct ObmcParams {
  int block_size = 16;
  ObmcWindow window = ObmcWindow::bilinear;
};

/// Overlapped block motion compensation.
///
/// Every block carries a separable triangular window of support
/// 2 * block_size centred on the block. A pixel blends the predictions of
/// its own block and of the nearest horizontal, vertical and diagonal
/// neighbours; the four weights sum to one. Neighbour indices outside the
/// grid clamp to the edge block. Reads clamp to the frame edge.
FrameBuffer obmc_predict(const FrameBuffer& reference, const MotionField& field,
                         const ObmcParams& params = {});

// Multiplies every vector by `scale` and rounds half away from zero.
MotionField scale_field(const MotionField& field, double scale);

/// Bidirectional motion-compensated frame at fraction t_frac of the way from
/// key_a to key_b, using one field estimated from key_b back to key_a.
FrameBuffer interpolate_obmc(const FrameBuffer& key_a, const FrameBuffer& key_b,
                             double t_frac, const SearchParams& search = {},
                             const ObmcParams& params = {});

FrameBuffer interpolate_linear(const FrameBuffer& key_a, const FrameBuffer& key_b,
                               double t_frac);

enum class InterpolationMethod { obmc, linear };

struct KeyFrame {
  std::size_t index;
  FrameBuffer frame;
};

// Rebuilds a length-T sequence from key-frames that include 0 and T - 1.
Sequence fill_sequence(const std::vector<KeyFrame>& keys, std::size_t length,
                       InterpolationMethod method, const SearchParams& search = {},
                       const ObmcParams& params = {}, FrameRate rate = {});

}  // namespace maiv
