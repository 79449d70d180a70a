#include "maiv/motion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "maiv/error.hpp"

namespace maiv {

void SearchParams::validate() const {
  if (search_range < 1 || block_size < 1 || !(early_exit_threshold > 0.0)) {
    throw ValidationError("search parameters must all be positive");
  }
}

MotionField::MotionField(int block_size_, int width, int height)
    : block_size(block_size_),
      grid_w((width + block_size_ - 1) / block_size_),
      grid_h((height + block_size_ - 1) / block_size_),
      vectors(static_cast<std::size_t>(grid_w) * static_cast<std::size_t>(grid_h)),
      costs(vectors.size(), 0.0) {}

bool MotionField::matches(int width, int height) const {
  return block_size > 0 && grid_w == (width + block_size - 1) / block_size &&
         grid_h == (height + block_size - 1) / block_size &&
         vectors.size() == static_cast<std::size_t>(grid_w) * static_cast<std::size_t>(grid_h) &&
         costs.size() == vectors.size();
}

MotionVector VectorBounds::clamp(MotionVector v) const {
  return {std::clamp(v.dx, min_dx, max_dx), std::clamp(v.dy, min_dy, max_dy)};
}

bool VectorBounds::contains(MotionVector v) const {
  return v.dx >= min_dx && v.dx <= max_dx && v.dy >= min_dy && v.dy <= max_dy;
}

VectorBounds vector_bounds(int width, int height, int block_size, int search_range,
                           int bx, int by) {
  const int x0 = bx * block_size;
  const int y0 = by * block_size;
  return {std::max(-search_range, -(block_size - 1) - x0),
          std::min(search_range, width - 1 - x0),
          std::max(-search_range, -(block_size - 1) - y0),
          std::min(search_range, height - 1 - y0)};
}

namespace {

// Single plane of channel-averaged intensity.
class Luma {
 public:
  explicit Luma(const FrameBuffer& f)
      : width_(f.width()), height_(f.height()), values_(f.pixel_count()) {
    const int channels = f.channels();
    for (std::size_t i = 0; i < values_.size(); ++i) {
      double sum = 0.0;
      for (int c = 0; c < channels; ++c) sum += f.plane(c)[i];
      values_[i] = channels == 1 ? sum : sum / channels;
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }

  double at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }
  double clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }
  bool inside(int x, int y, int size) const {
    return x >= 0 && y >= 0 && x + size <= width_ && y + size <= height_;
  }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

double sad(const Luma& target, const Luma& reference, int block_size, int bx,
           int by, MotionVector v) {
  const int x0 = bx * block_size;
  const int y0 = by * block_size;
  double sum = 0.0;
  if (target.inside(x0, y0, block_size) &&
      reference.inside(x0 + v.dx, y0 + v.dy, block_size)) {
    for (int y = 0; y < block_size; ++y) {
      for (int x = 0; x < block_size; ++x) {
        sum += std::abs(target.at(x0 + x, y0 + y) -
                        reference.at(x0 + x + v.dx, y0 + y + v.dy));
      }
    }
    return sum;
  }
  for (int y = 0; y < block_size; ++y) {
    for (int x = 0; x < block_size; ++x) {
      sum += std::abs(target.clamped(x0 + x, y0 + y) -
                      reference.clamped(x0 + x + v.dx, y0 + y + v.dy));
    }
  }
  return sum;
}

void check_pair(const FrameBuffer& target, const FrameBuffer& reference,
                const SearchParams& params) {
  params.validate();
  if (!target.same_shape(reference)) {
    throw ValidationError("motion search frames differ in shape");
  }
  if (target.width() < params.block_size || target.height() < params.block_size) {
    throw ValidationError("frames must be at least one block (" +
                          std::to_string(params.block_size) + " px) on each side");
  }
}

int median3(int a, int b, int c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

}  // namespace

double block_sad(const FrameBuffer& target, const FrameBuffer& reference,
                 int block_size, int bx, int by, MotionVector v) {
  if (!target.same_shape(reference)) {
    throw ValidationError("block_sad frames differ in shape");
  }
  return sad(Luma(target), Luma(reference), block_size, bx, by, v);
}

MotionField estimate_epzs(const FrameBuffer& target, const FrameBuffer& reference,
                          const SearchParams& params, const MotionField* prior) {
  check_pair(target, reference, params);
  const Luma tgt(target);
  const Luma ref(reference);
  const int bs = params.block_size;
  MotionField field(bs, target.width(), target.height());
  if (prior != nullptr && !(prior->block_size == bs &&
                            prior->matches(target.width(), target.height()))) {
    throw ValidationError("prior motion field does not match the frame grid");
  }
  const double exit_sad = params.early_exit_threshold * bs * bs;

  for (int by = 0; by < field.grid_h; ++by) {
    for (int bx = 0; bx < field.grid_w; ++bx) {
      const VectorBounds bounds = vector_bounds(target.width(), target.height(), bs,
                                                params.search_range, bx, by);
      const MotionVector zero{};
      const MotionVector left = bx > 0 ? field.at(bx - 1, by) : zero;
      const MotionVector top = by > 0 ? field.at(bx, by - 1) : zero;
      const MotionVector top_right =
          (by > 0 && bx + 1 < field.grid_w) ? field.at(bx + 1, by - 1) : zero;

      std::array<MotionVector, 5> candidates{};
      std::size_t n = 0;
      auto add = [&](MotionVector v) {
        v = bounds.clamp(v);
        if (std::find(candidates.begin(), candidates.begin() + static_cast<long>(n), v) ==
            candidates.begin() + static_cast<long>(n)) {
          candidates[n++] = v;
        }
      };
      add(zero);
      if (bx > 0) add(left);
      if (by > 0) add(top);
      if (bx > 0 || by > 0) {
        add({median3(left.dx, top.dx, top_right.dx), median3(left.dy, top.dy, top_right.dy)});
      }
      if (prior != nullptr) add(prior->at(bx, by));

      MotionVector best = candidates[0];
      double best_cost = sad(tgt, ref, bs, bx, by, best);
      for (std::size_t i = 1; i < n; ++i) {
        const double cost = sad(tgt, ref, bs, bx, by, candidates[i]);
        if (cost < best_cost) {
          best = candidates[i];
          best_cost = cost;
        }
      }

      if (best_cost > exit_sad) {
        static constexpr std::array<MotionVector, 4> kCross{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
        for (;;) {
          MotionVector step = best;
          double step_cost = best_cost;
          for (const MotionVector& d : kCross) {
            const MotionVector v{best.dx + d.dx, best.dy + d.dy};
            if (!bounds.contains(v)) continue;
            const double cost = sad(tgt, ref, bs, bx, by, v);
            if (cost < step_cost) {
              step = v;
              step_cost = cost;
            }
          }
          if (step == best) break;
          best = step;
          best_cost = step_cost;
        }
      }

      const auto b = static_cast<std::size_t>(by) * static_cast<std::size_t>(field.grid_w) +
                     static_cast<std::size_t>(bx);
      field.vectors[b] = best;
      field.costs[b] = best_cost;
    }
  }
  return field;
}

MotionField estimate_fullsearch(const FrameBuffer& target,
                                const FrameBuffer& reference,
                                const SearchParams& params) {
  check_pair(target, reference, params);
  const Luma tgt(target);
  const Luma ref(reference);
  const int bs = params.block_size;
  MotionField field(bs, target.width(), target.height());

  for (int by = 0; by < field.grid_h; ++by) {
    for (int bx = 0; bx < field.grid_w; ++bx) {
      const VectorBounds bounds = vector_bounds(target.width(), target.height(), bs,
                                                params.search_range, bx, by);
      MotionVector best{};
      double best_cost = std::numeric_limits<double>::infinity();
      for (int dy = bounds.min_dy; dy <= bounds.max_dy; ++dy) {
        for (int dx = bounds.min_dx; dx <= bounds.max_dx; ++dx) {
          const MotionVector v{dx, dy};
          const double cost = sad(tgt, ref, bs, bx, by, v);
          if (cost < best_cost || (cost == best_cost && v.l1() < best.l1())) {
            best = v;
            best_cost = cost;
          }
        }
      }
      const auto b = static_cast<std::size_t>(by) * static_cast<std::size_t>(field.grid_w) +
                     static_cast<std::size_t>(bx);
      field.vectors[b] = best;
      field.costs[b] = best_cost;
    }
  }
  return field;
}

FrameBuffer compensate_blocks(const FrameBuffer& reference, const MotionField& field) {
  if (!field.matches(reference.width(), reference.height())) {
    throw ValidationError("motion field grid does not match the reference frame");
  }
  FrameBuffer out(reference.width(), reference.height(), reference.channels());
  const int bs = field.block_size;
  for (int c = 0; c < reference.channels(); ++c) {
    for (int y = 0; y < reference.height(); ++y) {
      for (int x = 0; x < reference.width(); ++x) {
        const MotionVector& v = field.at(x / bs, y / bs);
        out.at(c, x, y) = reference.at_clamped(c, x + v.dx, y + v.dy);
      }
    }
  }
  return out;
}

}  // namespace maiv
