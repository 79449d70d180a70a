#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace maiv {

/// One image: `channels` planes of `height` rows of `width` intensities.
///
/// Samples are reals in [0,1], stored channel-planar and row-major, so the
/// sample for channel c at (x, y) lives at `(c * height + y) * width + x`.
class FrameBuffer {
 public:
  FrameBuffer() = default;
  FrameBuffer(int width, int height, int channels, double fill = 0.0);
  FrameBuffer(int width, int height, int channels, std::vector<double> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const { return samples_.empty(); }

  double at(int c, int x, int y) const { return samples_[index(c, x, y)]; }
  double& at(int c, int x, int y) { return samples_[index(c, x, y)]; }

  // Reads with coordinates clamped to the frame (edge replication).
  double at_clamped(int c, int x, int y) const;

  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  std::span<const double> plane(int c) const {
    return std::span<const double>(samples_).subspan(
        static_cast<std::size_t>(c) * pixel_count(), pixel_count());
  }

  bool same_shape(const FrameBuffer& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const FrameBuffer&, const FrameBuffer&) = default;

 private:
  std::size_t index(int c, int x, int y) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> samples_;
};

struct FrameRate {
  std::uint32_t num = 30;
  std::uint32_t den = 1;

  double fps() const { return static_cast<double>(num) / den; }
  friend bool operator==(const FrameRate&, const FrameRate&) = default;
};

/// Ordered, uniformly shaped frames; at least two of them.
class Sequence {
 public:
  explicit Sequence(std::vector<FrameBuffer> frames, FrameRate rate = {});

  std::size_t length() const { return frames_.size(); }
  const FrameBuffer& operator[](std::size_t i) const { return frames_[i]; }
  std::span<const FrameBuffer> frames() const { return frames_; }
  const FrameRate& frame_rate() const { return rate_; }

  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }
  int channels() const { return frames_.front().channels(); }

  Sequence reversed() const;

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<FrameBuffer> frames_;
  FrameRate rate_;
};

enum class VideoFormat { raw, pnm_dir };

// Byte <-> intensity mapping used by every 8-bit surface.
inline double from_byte(std::uint8_t v) { return v / 255.0; }
std::uint8_t to_byte(double v);

// Rounds every sample to the nearest 8-bit level.
FrameBuffer quantize(const FrameBuffer& frame);

Sequence load_sequence(const std::filesystem::path& path, VideoFormat format);
void save_sequence(const Sequence& seq, const std::filesystem::path& path,
                   VideoFormat format);

// Picks pnm_dir for existing directories, raw otherwise.
VideoFormat detect_format(const std::filesystem::path& path);

enum class ResizeFilter { box, bilinear };
enum class UpsampleFilter { nearest, bilinear };

/// Shrinks each side by 2^factor_d.
///
/// Width and height must be divisible by 2^factor_d. The box filter
/// averages each 2^d x 2^d tile; bilinear samples at the tile centre.
FrameBuffer resize(const FrameBuffer& frame, int factor_d,
                   ResizeFilter filter = ResizeFilter::box);

/// Grows each side by 2^factor_d.
FrameBuffer upsample(const FrameBuffer& frame, int factor_d,
                     UpsampleFilter filter);

}  // namespace maiv
