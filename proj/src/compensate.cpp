#include "maiv/compensate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maiv/error.hpp"

namespace maiv {

namespace {

double lerp(double a, double b, double w) { return a + w * (b - a); }

void check_t(double t_frac) {
  if (!(t_frac > 0.0 && t_frac < 1.0)) {
    throw ValidationError("t_frac must lie in (0, 1), got " + std::to_string(t_frac));
  }
}

// Neighbour block index along one axis and the neighbour's window weight.
struct AxisBlend {
  int own;
  int other;
  double weight;
};

AxisBlend axis_blend(int pos, int block_size, int grid) {
  const int own = pos / block_size;
  const double centre = own * block_size + 0.5 * (block_size - 1);
  const double offset = (pos - centre) / block_size;
  int other = offset >= 0.0 ? own + 1 : own - 1;
  if (other < 0 || other >= grid) other = own;
  return {own, other, std::abs(offset)};
}

FrameBuffer blend_bidirectional(const FrameBuffer& key_a, const FrameBuffer& key_b,
                                const MotionField& backward, double t_frac,
                                const ObmcParams& params) {
  const FrameBuffer forward_pred = obmc_predict(key_a, scale_field(backward, t_frac), params);
  const FrameBuffer backward_pred =
      obmc_predict(key_b, scale_field(backward, -(1.0 - t_frac)), params);
  FrameBuffer out(key_a.width(), key_a.height(), key_a.channels());
  const auto f = forward_pred.samples();
  const auto b = backward_pred.samples();
  auto o = out.samples();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = std::clamp(lerp(f[i], b[i], t_frac), 0.0, 1.0);
  }
  return out;
}

}  // namespace

FrameBuffer obmc_predict(const FrameBuffer& reference, const MotionField& field,
                         const ObmcParams& params) {
  if (params.block_size != field.block_size) {
    throw ValidationError("OBMC block size " + std::to_string(params.block_size) +
                          " differs from the motion field's " +
                          std::to_string(field.block_size));
  }
  if (!field.matches(reference.width(), reference.height())) {
    throw ValidationError("motion field grid does not match the reference frame");
  }
  const int bs = field.block_size;
  FrameBuffer out(reference.width(), reference.height(), reference.channels());

  for (int y = 0; y < reference.height(); ++y) {
    const AxisBlend ay = axis_blend(y, bs, field.grid_h);
    for (int x = 0; x < reference.width(); ++x) {
      const AxisBlend ax = axis_blend(x, bs, field.grid_w);
      const MotionVector& own = field.at(ax.own, ay.own);
      const MotionVector& horiz = field.at(ax.other, ay.own);
      const MotionVector& vert = field.at(ax.own, ay.other);
      const MotionVector& diag = field.at(ax.other, ay.other);
      for (int c = 0; c < reference.channels(); ++c) {
        auto pred = [&](const MotionVector& v) {
          return reference.at_clamped(c, x + v.dx, y + v.dy);
        };
        // Separable lerps keep the result exact when predictions agree.
        const double row_own = lerp(pred(own), pred(horiz), ax.weight);
        const double row_other = lerp(pred(vert), pred(diag), ax.weight);
        out.at(c, x, y) = std::clamp(lerp(row_own, row_other, ay.weight), 0.0, 1.0);
      }
    }
  }
  return out;
}

MotionField scale_field(const MotionField& field, double scale) {
  MotionField out = field;
  for (MotionVector& v : out.vectors) {
    v.dx = static_cast<int>(std::round(v.dx * scale));
    v.dy = static_cast<int>(std::round(v.dy * scale));
  }
  return out;
}

FrameBuffer interpolate_obmc(const FrameBuffer& key_a, const FrameBuffer& key_b,
                             double t_frac, const SearchParams& search,
                             const ObmcParams& params) {
  check_t(t_frac);
  if (!key_a.same_shape(key_b)) throw ValidationError("key-frames differ in shape");
  const MotionField backward = estimate_epzs(key_b, key_a, search);
  return blend_bidirectional(key_a, key_b, backward, t_frac, params);
}

FrameBuffer interpolate_linear(const FrameBuffer& key_a, const FrameBuffer& key_b,
                               double t_frac) {
  check_t(t_frac);
  if (!key_a.same_shape(key_b)) throw ValidationError("key-frames differ in shape");
  FrameBuffer out(key_a.width(), key_a.height(), key_a.channels());
  const auto a = key_a.samples();
  const auto b = key_b.samples();
  auto o = out.samples();
  // Symmetric in (a, t) and (b, 1 - t) whenever 1 - t is exact.
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = (1.0 - t_frac) * a[i] + t_frac * b[i];
  return out;
}

Sequence fill_sequence(const std::vector<KeyFrame>& keys, std::size_t length,
                       InterpolationMethod method, const SearchParams& search,
                       const ObmcParams& params, FrameRate rate) {
  if (keys.size() < 2 || keys.front().index != 0 || keys.back().index + 1 != length) {
    throw ValidationError("key-frames must start at 0 and end at " +
                          std::to_string(length == 0 ? 0 : length - 1));
  }
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i].index <= keys[i - 1].index) {
      throw ValidationError("key-frame indices must be strictly increasing");
    }
    if (!keys[i].frame.same_shape(keys[0].frame)) {
      throw ValidationError("key-frame " + std::to_string(keys[i].index) +
                            " differs in shape from key-frame 0");
    }
  }

  std::vector<FrameBuffer> frames(length);
  for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
    const KeyFrame& a = keys[k];
    const KeyFrame& b = keys[k + 1];
    frames[a.index] = a.frame;
    const std::size_t span = b.index - a.index;
    if (span < 2) continue;
    MotionField backward;
    if (method == InterpolationMethod::obmc) {
      backward = estimate_epzs(b.frame, a.frame, search);
    }
    for (std::size_t j = a.index + 1; j < b.index; ++j) {
      const double t = static_cast<double>(j - a.index) / static_cast<double>(span);
      frames[j] = method == InterpolationMethod::obmc
                      ? blend_bidirectional(a.frame, b.frame, backward, t, params)
                      : interpolate_linear(a.frame, b.frame, t);
    }
  }
  frames[keys.back().index] = keys.back().frame;
  return Sequence(std::move(frames), rate);
}

}  // namespace maiv
