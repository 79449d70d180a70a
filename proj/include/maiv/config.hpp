#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "maiv/compensate.hpp"
#include "maiv/core.hpp"
#include "maiv/motion.hpp"

namespace maiv {

enum class KeyStrategy { peaks, fixed, random };
enum class BackendKind { oracle, subprocess };

/// Every knob of a pipeline run. Stored on disk as `key = value` lines;
/// `#` starts a comment.
struct PipelineConfig {
  int window = 3;
  int d = 1;
  int p = 1;
  KeyStrategy strategy = KeyStrategy::peaks;
  std::size_t gap = 4;
  std::size_t count = 2;
  std::uint64_t seed = 0;
  InterpolationMethod method = InterpolationMethod::obmc;
  BackendKind backend = BackendKind::oracle;
  std::string backend_command;
  UpsampleFilter oracle_mode = UpsampleFilter::nearest;
  SearchParams search;
  ObmcParams obmc;
  double generator_gmacs = 282.0;

  void validate() const;

  std::string to_text() const;
  static PipelineConfig from_text(const std::string& text);
  static PipelineConfig from_file(const std::filesystem::path& path);

  // Applies one `key = value` assignment; unknown keys are rejected.
  void set(const std::string& key, const std::string& value);

  friend bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
    return a.to_text() == b.to_text();
  }
};

}  // namespace maiv
