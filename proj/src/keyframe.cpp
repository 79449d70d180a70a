#include "maiv/keyframe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "maiv/error.hpp"

namespace maiv {

KeyframeSet::KeyframeSet(std::vector<std::size_t> indices,
                         std::size_t source_length)
    : indices_(std::move(indices)), source_length_(source_length) {
  if (source_length_ < 2) {
    throw ValidationError("key-frame source length must be >= 2");
  }
  if (indices_.size() < 2) {
    throw ValidationError("a key-frame set needs at least 2 indices");
  }
  for (std::size_t i = 1; i < indices_.size(); ++i) {
    if (indices_[i] <= indices_[i - 1]) {
      throw ValidationError("key-frame indices must be strictly increasing");
    }
  }
  if (indices_.front() != 0 || indices_.back() != source_length_ - 1) {
    throw ValidationError("key-frame set must contain frames 0 and " +
                          std::to_string(source_length_ - 1));
  }
}

bool KeyframeSet::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

DifferenceCurve residual_curve(const Sequence& seq) {
  DifferenceCurve curve;
  curve.values.reserve(seq.length() - 1);
  for (std::size_t t = 0; t + 1 < seq.length(); ++t) {
    const auto a = seq[t].samples();
    const auto b = seq[t + 1].samples();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(b[i] - a[i]);
    curve.values.push_back(sum);
  }
  return curve;
}

DifferenceCurve smooth(const DifferenceCurve& curve, int window) {
  const auto n = static_cast<long>(curve.values.size());
  if (window < 1 || window % 2 == 0) {
    throw ValidationError("smoothing window must be a positive odd integer, got " +
                          std::to_string(window));
  }
  if (window > n) {
    throw ValidationError("smoothing window " + std::to_string(window) +
                          " exceeds curve length " + std::to_string(n));
  }
  DifferenceCurve out;
  out.window = window;
  out.values.resize(curve.values.size());
  const long half = window / 2;
  for (long i = 0; i < n; ++i) {
    double sum = 0.0;
    for (long j = i - half; j <= i + half; ++j) {
      sum += curve.values[static_cast<std::size_t>(std::clamp(j, 0L, n - 1))];
    }
    out.values[static_cast<std::size_t>(i)] = sum / window;
  }
  return out;
}

namespace {

// Curve positions whose smoothed value is a strict maximum of the
// neighbourhood [i - half, i + half]. Ties on the smoothed value fall back to
// the raw value, then to position (earlier wins). The last position maps to
// the final frame, which is always a key, so it is never reported.
std::vector<long> curve_peaks(const std::vector<double>& smoothed,
                              const std::vector<double>& raw, long half) {
  const auto n = static_cast<long>(raw.size());
  auto at = [&](long i) {
    const auto k = static_cast<std::size_t>(std::clamp(i, 0L, n - 1));
    return std::pair{smoothed[k], raw[k]};
  };
  std::vector<long> peaks;
  for (long i = 0; i + 1 < n; ++i) {
    const auto centre = at(i);
    bool peak = true;
    for (long j = i - half; j <= i + half && peak; ++j) {
      if (j == i) continue;
      // Earlier positions, including the replicated left edge, must be
      // strictly lower; later ones may tie.
      peak = j < i ? centre > at(j) : centre >= at(j);
    }
    if (peak) peaks.push_back(i);
  }
  return peaks;
}

long neighbourhood(int window) { return std::max(1, window / 2); }

}  // namespace

KeyframeSet select_keyframes(const DifferenceCurve& curve, int window) {
  smooth(curve, window);  // validates the window against the curve

  // Peaks are followed from window 1 upward; a peak at window w survives
  // only if it claims a distinct surviving peak of window w - 2 within its
  // neighbourhood, so the count cannot grow with the window.
  std::vector<long> peaks = curve_peaks(curve.values, curve.values, neighbourhood(1));
  for (int w = 3; w <= window; w += 2) {
    const long half = neighbourhood(w);
    const std::vector<long> candidates = curve_peaks(smooth(curve, w).values, curve.values, half);
    std::vector<bool> claimed(peaks.size(), false);
    std::vector<long> kept;
    for (long p : candidates) {
      std::size_t best = peaks.size();
      for (std::size_t q = 0; q < peaks.size(); ++q) {
        const long dist = std::abs(p - peaks[q]);
        if (claimed[q] || dist > half) continue;
        if (best == peaks.size() || dist < std::abs(p - peaks[best])) best = q;
      }
      if (best != peaks.size()) {
        claimed[best] = true;
        kept.push_back(p);
      }
    }
    peaks = std::move(kept);
  }

  // Peak i measures the change from frame i to frame i + 1.
  const auto last = curve.values.size();
  std::vector<std::size_t> keys{0};
  for (long p : peaks) keys.push_back(static_cast<std::size_t>(p) + 1);
  keys.push_back(last);
  return KeyframeSet(std::move(keys), last + 1);
}

KeyframeSet select_fixed_gap(std::size_t length, std::size_t gap) {
  if (length < 2) throw ValidationError("sequence length must be >= 2");
  if (gap < 1 || gap >= length) {
    throw ValidationError("fixed gap must be in [1, " + std::to_string(length - 1) +
                          "], got " + std::to_string(gap));
  }
  std::vector<std::size_t> keys;
  for (std::size_t i = 0; i < length; i += gap) keys.push_back(i);
  if (keys.back() != length - 1) keys.push_back(length - 1);
  return KeyframeSet(std::move(keys), length);
}

namespace {

// Unbiased draw from [0, bound) using only the engine's raw output, which is
// fixed by the standard (unlike std::uniform_int_distribution).
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = 0;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace

KeyframeSet select_random_gap(std::size_t length, std::size_t count,
                              std::uint64_t seed) {
  if (length < 2) throw ValidationError("sequence length must be >= 2");
  if (count < 2 || count > length) {
    throw ValidationError("random key-frame count must be in [2, " +
                          std::to_string(length) + "], got " + std::to_string(count));
  }
  std::vector<std::size_t> interior(length - 2);
  std::iota(interior.begin(), interior.end(), std::size_t{1});

  // Partial Fisher-Yates: the first `count - 2` slots become the sample.
  std::mt19937_64 rng(seed);
  const std::size_t picks = count - 2;
  for (std::size_t i = 0; i < picks; ++i) {
    const std::size_t j = i + bounded(rng, interior.size() - i);
    std::swap(interior[i], interior[j]);
  }
  std::vector<std::size_t> keys(interior.begin(), interior.begin() + static_cast<long>(picks));
  keys.push_back(0);
  keys.push_back(length - 1);
  std::sort(keys.begin(), keys.end());
  return KeyframeSet(std::move(keys), length);
}

}  // namespace maiv
