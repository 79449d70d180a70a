#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "maiv/core.hpp"

namespace maiv {

// Integer-pel displacement. A block at (x, y) in the target frame matches
// the reference block at (x + dx, y + dy).
struct MotionVector {
  int dx = 0;
  int dy = 0;

  int l1() const { return (dx < 0 ? -dx : dx) + (dy < 0 ? -dy : dy); }
  friend bool operator==(const MotionVector&, const MotionVector&) = default;
};

struct SearchParams {
  int search_range = 16;
  double early_exit_threshold = 1.0 / 255.0;  // SAD per pixel
  int block_size = 16;

  void validate() const;
};

/// Per-block motion between a target and a reference frame.
struct MotionField {
  int block_size = 16;
  int grid_w = 0;
  int grid_h = 0;
  std::vector<MotionVector> vectors;  // raster order
  std::vector<double> costs;          // SAD of each block at its vector

  MotionField() = default;
  MotionField(int block_size, int width, int height);

  std::size_t block_count() const { return vectors.size(); }
  const MotionVector& at(int bx, int by) const {
    return vectors[static_cast<std::size_t>(by) * static_cast<std::size_t>(grid_w) +
                   static_cast<std::size_t>(bx)];
  }
  MotionVector& at(int bx, int by) {
    return vectors[static_cast<std::size_t>(by) * static_cast<std::size_t>(grid_w) +
                   static_cast<std::size_t>(bx)];
  }

  // True when the grid covers a width x height frame.
  bool matches(int width, int height) const;

  friend bool operator==(const MotionField&, const MotionField&) = default;
};

// Channel-averaged block SAD with edge-clamped reads on both frames. Partial
// edge blocks are padded to full size by clamping.
double block_sad(const FrameBuffer& target, const FrameBuffer& reference,
                 int block_size, int bx, int by, MotionVector v);

// Inclusive displacement limits for one axis: within +-range and keeping at
// least one pixel of the displaced block inside the frame.
struct VectorBounds {
  int min_dx, max_dx, min_dy, max_dy;
  MotionVector clamp(MotionVector v) const;
  bool contains(MotionVector v) const;
};
VectorBounds vector_bounds(int width, int height, int block_size, int search_range,
                           int bx, int by);

/// Predictive zonal search.
///
/// Blocks are visited in raster order. Candidates are the zero vector, the
/// left and top neighbours, the component median of left/top/top-right, and
/// the collocated vector of `prior`. The best candidate is accepted when its
/// SAD is within the early-exit threshold; otherwise a +-1 cross search is
/// iterated from it until no neighbour improves.
MotionField estimate_epzs(const FrameBuffer& target, const FrameBuffer& reference,
                          const SearchParams& params,
                          const MotionField* prior = nullptr);

// Exhaustive search over the whole window. Ties prefer the smaller |dx|+|dy|,
// then the earlier candidate in raster order.
MotionField estimate_fullsearch(const FrameBuffer& target,
                                const FrameBuffer& reference,
                                const SearchParams& params);

// Non-overlapped prediction: each block copied from its displaced position.
FrameBuffer compensate_blocks(const FrameBuffer& reference, const MotionField& field);

}  // namespace maiv
