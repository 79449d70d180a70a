#include "maiv/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "maiv/error.hpp"

namespace maiv {

void LossWeights::validate() const {
  if (alpha < 0 || beta < 0 || sigma < 0 || gamma < 0) {
    throw ValidationError("loss weights must be non-negative");
  }
}

namespace {

void check_clips(std::span<const FrameBuffer> a, std::span<const FrameBuffer> b) {
  if (a.empty() || a.size() != b.size()) {
    throw ValidationError("clips must be non-empty and of equal length (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].same_shape(b[i]) || !a[i].same_shape(a[0])) {
      throw ValidationError("clip frame " + std::to_string(i) + " shapes differ");
    }
  }
}

// Cell boundaries split [0, extent) into kGrid nearly equal parts.
int cell_edge(int i, int extent) { return i * extent / ReferenceExtractor::kGrid; }

}  // namespace

std::vector<double> ReferenceExtractor::extract(std::span<const FrameBuffer> clip) const {
  if (clip.empty()) throw ValidationError("feature extraction needs at least one frame");
  const FrameBuffer& first = clip.front();
  for (const FrameBuffer& f : clip) {
    if (!f.same_shape(first)) throw ValidationError("clip frames differ in shape");
  }
  if (first.width() < kGrid || first.height() < kGrid) {
    throw ValidationError("reference extractor needs frames of at least 4x4");
  }

  const int w = first.width();
  const int h = first.height();
  const int channels = first.channels();
  const std::size_t frames = clip.size();
  std::vector<double> features;
  features.reserve(kDims);

  for (int gy = 0; gy < kGrid; ++gy) {
    const int y0 = cell_edge(gy, h), y1 = cell_edge(gy + 1, h);
    for (int gx = 0; gx < kGrid; ++gx) {
      const int x0 = cell_edge(gx, w), x1 = cell_edge(gx + 1, w);
      double temporal = 0, horiz = 0, vert = 0, mean = 0;
      std::size_t n_temporal = 0, n_horiz = 0, n_vert = 0, n_mean = 0;
      for (std::size_t t = 0; t < frames; ++t) {
        const FrameBuffer& f = clip[t];
        for (int c = 0; c < channels; ++c) {
          for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
              const double v = f.at(c, x, y);
              mean += v;
              ++n_mean;
              if (x + 1 < w) {
                horiz += std::abs(f.at(c, x + 1, y) - v);
                ++n_horiz;
              }
              if (y + 1 < h) {
                vert += std::abs(f.at(c, x, y + 1) - v);
                ++n_vert;
              }
              if (t + 1 < frames) {
                temporal += std::abs(clip[t + 1].at(c, x, y) - v);
                ++n_temporal;
              }
            }
          }
        }
      }
      auto avg = [](double s, std::size_t n) { return n == 0 ? 0.0 : s / static_cast<double>(n); };
      features.push_back(avg(temporal, n_temporal));
      features.push_back(avg(horiz, n_horiz));
      features.push_back(avg(vert, n_vert));
      features.push_back(avg(mean, n_mean));
    }
  }
  return features;
}

std::vector<double> reference_extractor(std::span<const FrameBuffer> clip) {
  return ReferenceExtractor{}.extract(clip);
}

double mse_frames(const FrameBuffer& a, const FrameBuffer& b) {
  if (!a.same_shape(b) || a.empty()) throw ValidationError("mse: frame shapes differ");
  return mse_vectors(a.samples(), b.samples());
}

double mse_vectors(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw ValidationError("mse: vector lengths differ (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum / static_cast<double>(a.size());
}

double psnr(const FrameBuffer& a, const FrameBuffer& b) {
  const double err = mse_frames(a, b);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(err);
}

double perceptual_distance(const FrameBuffer& a, const FrameBuffer& b,
                           const FeatureExtractor& extractor) {
  if (!a.same_shape(b)) throw ValidationError("perceptual distance: frame shapes differ");
  const std::vector<double> fa = extractor.extract(std::span(&a, 1));
  const std::vector<double> fb = extractor.extract(std::span(&b, 1));
  return mse_vectors(fa, fb);
}

double loss_skd(std::span<const FrameBuffer> student, std::span<const FrameBuffer> teacher,
                const FeatureExtractor& extractor) {
  check_clips(student, teacher);
  double sum = 0.0;
  for (std::size_t t = 0; t < student.size(); ++t) {
    sum += mse_frames(teacher[t], student[t]) +
           perceptual_distance(teacher[t], student[t], extractor);
  }
  return sum / static_cast<double>(student.size());
}

double loss_ltkd(std::span<const FrameBuffer> student, std::span<const FrameBuffer> teacher,
                 const FeatureExtractor& extractor) {
  return loss_skd(student, teacher, extractor);
}

double loss_gtkd(std::span<const FrameBuffer> student, std::span<const FrameBuffer> teacher,
                 const FeatureExtractor& extractor) {
  check_clips(student, teacher);
  return mse_vectors(extractor.extract(student), extractor.extract(teacher));
}

double combine_tkd(double ltkd, double gtkd, const LossWeights& weights) {
  weights.validate();
  return weights.alpha * ltkd + weights.beta * gtkd;
}

double loss_tkd(std::span<const FrameBuffer> student, std::span<const FrameBuffer> teacher,
                const LossWeights& weights, const FeatureExtractor& extractor) {
  return combine_tkd(loss_ltkd(student, teacher, extractor),
                     loss_gtkd(student, teacher, extractor), weights);
}

double loss_kd(double skd, double tkd, const LossWeights& weights) {
  weights.validate();
  return weights.sigma * skd + weights.gamma * tkd;
}

CostReport account_macs(const KeyframeSet& keys, int width, int height,
                        double generator_gmacs_per_frame, const MacModel& model) {
  if (width < 1 || height < 1 || model.block_size < 1) {
    throw ValidationError("cost model needs positive frame and block sizes");
  }
  const double blocks = std::ceil(static_cast<double>(width) / model.block_size) *
                        std::ceil(static_cast<double>(height) / model.block_size);
  const double pixels = static_cast<double>(width) * static_cast<double>(height);

  CostReport r;
  r.frames_generated = keys.size();
  r.frames_interpolated = keys.source_length() - keys.size();
  const auto& idx = keys.indices();
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] - idx[i - 1] > 1) ++r.gaps_estimated;
  }
  r.generator_macs = static_cast<double>(r.frames_generated) * generator_gmacs_per_frame * kGiga;
  r.epzs_macs = static_cast<double>(r.gaps_estimated) * model.epzs_macs_per_block * blocks;
  r.obmc_macs = static_cast<double>(r.frames_interpolated) * model.obmc_macs_per_pixel * pixels;
  r.selector_macs = 0.0;
  r.total_macs = r.generator_macs + r.epzs_macs + r.obmc_macs + r.selector_macs;
  return r;
}

}  // namespace maiv
