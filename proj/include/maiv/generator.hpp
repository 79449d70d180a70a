#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <sys/types.h>

#include "maiv/compensate.hpp"
#include "maiv/core.hpp"
#include "maiv/keyframe.hpp"

namespace maiv {

/// Input of one part-time generator call.
///
/// `semantic_maps` holds p + 1 low-resolution maps, oldest first, the last
/// one at the key-frame being generated. `previous_frames` holds the p most
/// recent generated frames at full resolution, oldest first.
struct GeneratorRequest {
  std::vector<FrameBuffer> semantic_maps;
  std::vector<FrameBuffer> previous_frames;
  int p = 1;
  int d = 1;
  int height = 0;  // full resolution
  int width = 0;

  int channels() const { return semantic_maps.empty() ? 0 : semantic_maps.front().channels(); }
  void validate() const;
};

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;

  virtual FrameBuffer generate(const GeneratorRequest& request) = 0;

  // Declared cost of one invocation, in G-MACs.
  virtual double macs_per_frame() const = 0;
};

// Deterministic stand-in: upsamples the newest semantic map to full size.
FrameBuffer oracle_generate(const GeneratorRequest& request,
                            UpsampleFilter mode = UpsampleFilter::nearest);

class OracleBackend final : public GeneratorBackend {
 public:
  explicit OracleBackend(UpsampleFilter mode = UpsampleFilter::nearest,
                         double gmacs_per_frame = 282.0)
      : mode_(mode), gmacs_(gmacs_per_frame) {}

  FrameBuffer generate(const GeneratorRequest& request) override {
    return oracle_generate(request, mode_);
  }
  double macs_per_frame() const override { return gmacs_; }

 private:
  UpsampleFilter mode_;
  double gmacs_;
};

// Little-endian framing exchanged with an external generator process.
namespace wire {

inline constexpr char kRequestMagic[4] = {'M', 'A', 'I', 'G'};
inline constexpr char kResponseMagic[4] = {'M', 'A', 'I', 'R'};

std::vector<std::uint8_t> encode_request(const GeneratorRequest& request);
std::vector<std::uint8_t> encode_response(const FrameBuffer& frame);

// Parses a response payload (magic included) for a width x height x channels
// frame.
FrameBuffer decode_response(const std::vector<std::uint8_t>& bytes, int width,
                            int height, int channels);

}  // namespace wire

/// Generator running in a child process that speaks the wire protocol on its
/// standard input and output. The child is started once and serves every
/// frame; it is reaped on destruction.
class SubprocessBackend final : public GeneratorBackend {
 public:
  SubprocessBackend(std::vector<std::string> argv, double gmacs_per_frame = 282.0);
  ~SubprocessBackend() override;

  SubprocessBackend(const SubprocessBackend&) = delete;
  SubprocessBackend& operator=(const SubprocessBackend&) = delete;

  FrameBuffer generate(const GeneratorRequest& request) override;
  double macs_per_frame() const override { return gmacs_; }

  pid_t pid() const { return pid_; }

 private:
  [[noreturn]] void fail(const std::string& what);
  void write_all(const std::uint8_t* data, std::size_t size);
  bool read_exact(std::uint8_t* data, std::size_t size);
  std::string child_status();

  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool reaped_ = false;
  int wait_status_ = 0;
  double gmacs_;
};

// Splits a shell-like command line on whitespace (no quoting).
std::vector<std::string> split_command(const std::string& command);

struct GeneratedKey {
  std::size_t index;
  FrameBuffer frame;
};

/// Runs the backend once per key-frame, in key order.
///
/// The request for key m carries the semantic maps at keys m - p .. m (each
/// shrunk by 2^d with the box filter) and the frames generated for keys
/// m - p .. m - 1. Missing context at the start replicates the earliest
/// available entry; before any frame is generated `initial_frame` is used
/// if given, else a black frame.
std::vector<GeneratedKey> run_keyframes(const Sequence& semantic, const KeyframeSet& keys,
                                        GeneratorBackend& backend, int p = 1, int d = 1,
                                        const FrameBuffer* initial_frame = nullptr);

}  // namespace maiv
