#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maiv/core.hpp"
#include "maiv/keyframe.hpp"

namespace maiv {

struct LossWeights {
  double alpha = 2.0;   // local temporal term
  double beta = 15.0;   // global temporal term
  double sigma = 1.0;   // spatial term
  double gamma = 2.0;   // temporal term

  void validate() const;
};

// Clip-level feature vector of fixed length. Implementations must be
// deterministic and reentrant.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::vector<double> extract(std::span<const FrameBuffer> clip) const = 0;
};

/// Hand-crafted clip descriptor.
///
/// The frame is split into a 4x4 grid; for each cell (row-major) four
/// values are emitted: mean |temporal difference|, mean |horizontal
/// gradient|, mean |vertical gradient| and mean intensity. 64 values total.
class ReferenceExtractor final : public FeatureExtractor {
 public:
  static constexpr int kGrid = 4;
  static constexpr int kStats = 4;
  static constexpr std::size_t kDims = kGrid * kGrid * kStats;

  std::vector<double> extract(std::span<const FrameBuffer> clip) const override;
};

std::vector<double> reference_extractor(std::span<const FrameBuffer> clip);

double mse_frames(const FrameBuffer& a, const FrameBuffer& b);
double mse_vectors(std::span<const double> a, std::span<const double> b);
// PSNR in dB for unit-range signals; infinity for identical frames.
double psnr(const FrameBuffer& a, const FrameBuffer& b);

double perceptual_distance(const FrameBuffer& a, const FrameBuffer& b,
                           const FeatureExtractor& extractor);

// Mean over time of per-frame MSE plus perceptual distance.
double loss_skd(std::span<const FrameBuffer> student, std::span<const FrameBuffer> teacher,
                const FeatureExtractor& extractor);
// Same form as loss_skd over caller-aligned (key timestamp) pairs.
double loss_ltkd(std::span<const FrameBuffer> student, std::span<const FrameBuffer> teacher,
                 const FeatureExtractor& extractor);
// Feature-space MSE between whole clips.
double loss_gtkd(std::span<const FrameBuffer> student, std::span<const FrameBuffer> teacher,
                 const FeatureExtractor& extractor);

double combine_tkd(double ltkd, double gtkd, const LossWeights& weights);
double loss_tkd(std::span<const FrameBuffer> student, std::span<const FrameBuffer> teacher,
                const LossWeights& weights, const FeatureExtractor& extractor);
double loss_kd(double skd, double tkd, const LossWeights& weights);

// Per-unit constants of the interpolation cost model.
struct MacModel {
  double epzs_macs_per_block = 2.0;
  double obmc_macs_per_pixel = 5.0;
  int block_size = 16;
};

/// Compute tally for one synthesized sequence. MAC values are plain MACs
/// (not G-MACs).
struct CostReport {
  double generator_macs = 0;
  double epzs_macs = 0;
  double obmc_macs = 0;
  double selector_macs = 0;
  double total_macs = 0;
  std::size_t frames_generated = 0;
  std::size_t frames_interpolated = 0;
  std::size_t gaps_estimated = 0;

  std::size_t frames() const { return frames_generated + frames_interpolated; }
  double mean_macs_per_frame() const {
    return frames() == 0 ? 0.0 : total_macs / static_cast<double>(frames());
  }

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

inline constexpr double kGiga = 1e9;

/// Key-frames cost `generator_gmacs_per_frame` each. Every gap holding at
/// least one interpolated frame costs one motion search over the block grid;
/// every interpolated frame costs one OBMC pass over its pixels.
CostReport account_macs(const KeyframeSet& keys, int width, int height,
                        double generator_gmacs_per_frame, const MacModel& model = {});

}  // namespace maiv
