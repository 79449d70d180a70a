#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "maiv/core.hpp"

namespace maiv {

/// Sorted frame indices chosen for generator synthesis.
///
/// Always strictly increasing, within [0, source_length), holding both
/// endpoints and at least two entries.
class KeyframeSet {
 public:
  KeyframeSet(std::vector<std::size_t> indices, std::size_t source_length);

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t source_length() const { return source_length_; }
  std::size_t size() const { return indices_.size(); }
  bool contains(std::size_t index) const;

  friend bool operator==(const KeyframeSet&, const KeyframeSet&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t source_length_;
};

// Adjacent-frame residual energy; values[i] compares frames i and i+1.
struct DifferenceCurve {
  std::vector<double> values;
  int window = 1;
};

inline constexpr int kDefaultSelectorWindow = 3;

DifferenceCurve residual_curve(const Sequence& seq);

// Centred moving average with edge replication; output has the input length.
DifferenceCurve smooth(const DifferenceCurve& curve, int window);

/// Key-frames at the peaks of the smoothed residual curve.
///
/// A curve index i is a peak when its smoothed value is a strict maximum
/// over the neighbourhood [i - h, i + h] (h = max(1, window / 2), edges
/// replicated). Equal smoothed values are ordered by the raw residual and
/// then by position, earlier winning. Peak i marks frame i + 1; frames 0
/// and T - 1 are always included.
KeyframeSet select_keyframes(const DifferenceCurve& curve,
                             int window = kDefaultSelectorWindow);

// {0, gap, 2*gap, ...} plus the last frame.
KeyframeSet select_fixed_gap(std::size_t length, std::size_t gap);

// Endpoints plus count - 2 distinct interior frames drawn from a seeded
// mt19937_64.
KeyframeSet select_random_gap(std::size_t length, std::size_t count,
                              std::uint64_t seed);

}  // namespace maiv
