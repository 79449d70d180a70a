#pragma once

// Synthetic frames and sequences shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "maiv/core.hpp"
#include "maiv/motion.hpp"

namespace maiv::fixtures {

using Field2D = std::function<double(double, double)>;

inline FrameBuffer sample(int w, int h, const Field2D& f, int channels = 1) {
  FrameBuffer out(w, h, channels);
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        // Slight per-channel offset keeps colour frames non-degenerate.
        out.at(c, x, y) = std::clamp(f(x, y) + 0.02 * c, 0.0, 1.0);
      }
    }
  }
  return out;
}

/// Smooth band-limited texture in [0.1, 0.9]: a handful of random
/// low-frequency plane waves.
inline Field2D smooth_texture(std::uint64_t seed, double min_wavelength = 14.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 6; ++i) {
    const double wavelength = min_wavelength + unit(rng) * 3.0 * min_wavelength;
    const double angle = unit(rng) * 2.0 * std::numbers::pi;
    const double k = 2.0 * std::numbers::pi / wavelength;
    waves.push_back({k * std::cos(angle), k * std::sin(angle),
                     unit(rng) * 2.0 * std::numbers::pi, 0.5 + unit(rng)});
  }
  double norm = 0;
  for (const Wave& w : waves) norm += w.amp;
  return [waves, norm](double x, double y) {
    double v = 0;
    for (const Wave& w : waves) v += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
    return 0.5 + 0.4 * v / norm;
  };
}

// Cone centred at (cx, cy): a well-conditioned target for descent searches.
inline Field2D cone(double cx, double cy, double scale = 96.0) {
  return [=](double x, double y) { return std::min(1.0, std::hypot(x - cx, y - cy) / scale); };
}

inline Field2D translate(Field2D f, double dx, double dy) {
  return [f = std::move(f), dx, dy](double x, double y) { return f(x - dx, y - dy); };
}

inline Field2D rotate(Field2D f, double cx, double cy, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  return [f = std::move(f), cx, cy, c, s](double x, double y) {
    const double u = x - cx, v = y - cy;
    return f(cx + c * u + s * v, cy - s * u + c * v);
  };
}

/// Target built from `reference` by edge-clamped reads at (x + dx, y + dy),
/// so every block of the target matches the reference at vector (dx, dy).
inline FrameBuffer clamped_shift(const FrameBuffer& reference, int dx, int dy) {
  FrameBuffer out(reference.width(), reference.height(), reference.channels());
  for (int c = 0; c < reference.channels(); ++c) {
    for (int y = 0; y < reference.height(); ++y) {
      for (int x = 0; x < reference.width(); ++x) {
        out.at(c, x, y) = reference.at_clamped(c, x + dx, y + dy);
      }
    }
  }
  return out;
}

inline FrameBuffer noise_frame(int w, int h, std::uint64_t seed, int channels = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FrameBuffer out(w, h, channels);
  for (double& s : out.samples()) s = unit(rng);
  return out;
}

inline MotionField random_field(int w, int h, int block_size, int range, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(-range, range);
  MotionField field(block_size, w, h);
  for (MotionVector& v : field.vectors) v = {pick(rng), pick(rng)};
  return field;
}

// Frames of a texture moving with constant velocity (vx, vy) px/frame.
inline Sequence translating_sequence(const Field2D& tex, int w, int h, std::size_t length,
                                     double vx, double vy, int channels = 1) {
  std::vector<FrameBuffer> frames;
  for (std::size_t t = 0; t < length; ++t) {
    frames.push_back(sample(w, h, translate(tex, vx * t, vy * t), channels));
  }
  return Sequence(std::move(frames));
}

/// Texture that sits still except during short bursts in which it moves
/// quickly. Bursts are placed at random, non-overlapping positions.
inline Sequence bursty_sequence(std::uint64_t seed, int w, int h, std::size_t length,
                                int bursts, std::size_t burst_len, double speed) {
  std::mt19937_64 rng(seed);
  const Field2D tex = smooth_texture(seed * 7919 + 1);
  std::vector<double> vx(length, 0.0), vy(length, 0.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const std::size_t slot = (length - 2) / static_cast<std::size_t>(bursts);
  for (int b = 0; b < bursts; ++b) {
    std::uniform_int_distribution<std::size_t> start_pick(0, slot - burst_len);
    const std::size_t start = 1 + static_cast<std::size_t>(b) * slot + start_pick(rng);
    const double a = angle(rng);
    for (std::size_t t = start; t < start + burst_len && t < length; ++t) {
      vx[t] = speed * std::cos(a);
      vy[t] = speed * std::sin(a);
    }
  }
  std::vector<FrameBuffer> frames;
  double px = 0, py = 0;
  for (std::size_t t = 0; t < length; ++t) {
    px += vx[t];
    py += vy[t];
    frames.push_back(sample(w, h, translate(tex, px, py)));
  }
  return Sequence(std::move(frames));
}

inline double max_abs_diff(const FrameBuffer& a, const FrameBuffer& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  }
  return m;
}

// Max |a - b| over pixels at least `margin` away from every edge.
inline double interior_max_diff(const FrameBuffer& a, const FrameBuffer& b, int margin) {
  double m = 0;
  for (int c = 0; c < a.channels(); ++c) {
    for (int y = margin; y < a.height() - margin; ++y) {
      for (int x = margin; x < a.width() - margin; ++x) {
        m = std::max(m, std::abs(a.at(c, x, y) - b.at(c, x, y)));
      }
    }
  }
  return m;
}

}  // namespace maiv::fixtures
