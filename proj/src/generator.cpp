#include "maiv/generator.hpp"

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "maiv/error.hpp"

extern char** environ;

namespace maiv {

namespace {

std::string dims(int w, int h, int c) {
  return std::to_string(w) + "x" + std::to_string(h) + "x" + std::to_string(c);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_frame(std::vector<std::uint8_t>& out, const FrameBuffer& frame) {
  for (double s : frame.samples()) out.push_back(to_byte(s));
}

constexpr std::size_t kResponseHeader = 16;  // magic + H + W + channels

}  // namespace

void GeneratorRequest::validate() const {
  if (p < 0 || d < 0 || d > 15) throw ValidationError("generator request: bad p or d");
  if (semantic_maps.size() != static_cast<std::size_t>(p) + 1) {
    throw ValidationError("generator request needs " + std::to_string(p + 1) +
                          " semantic maps, got " + std::to_string(semantic_maps.size()));
  }
  if (previous_frames.size() != static_cast<std::size_t>(p)) {
    throw ValidationError("generator request needs " + std::to_string(p) +
                          " previous frames, got " + std::to_string(previous_frames.size()));
  }
  const int scale = 1 << d;
  if (width < 1 || height < 1 || width % scale != 0 || height % scale != 0) {
    throw ValidationError("generator request: full resolution " + std::to_string(width) +
                          "x" + std::to_string(height) + " is not divisible by 2^" +
                          std::to_string(d));
  }
  const int c = channels();
  for (const FrameBuffer& m : semantic_maps) {
    if (m.width() != width / scale || m.height() != height / scale || m.channels() != c) {
      throw ValidationError("semantic map is " + dims(m.width(), m.height(), m.channels()) +
                            ", expected " + dims(width / scale, height / scale, c));
    }
  }
  for (const FrameBuffer& f : previous_frames) {
    if (f.width() != width || f.height() != height || f.channels() != c) {
      throw ValidationError("previous frame is " + dims(f.width(), f.height(), f.channels()) +
                            ", expected " + dims(width, height, c));
    }
  }
}

FrameBuffer oracle_generate(const GeneratorRequest& request, UpsampleFilter mode) {
  request.validate();
  return upsample(request.semantic_maps.back(), request.d, mode);
}

// ---------------------------------------------------------------------------

namespace wire {

std::vector<std::uint8_t> encode_request(const GeneratorRequest& request) {
  request.validate();
  std::vector<std::uint8_t> out(kRequestMagic, kRequestMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(request.p));
  put_u32(out, static_cast<std::uint32_t>(request.d));
  put_u32(out, static_cast<std::uint32_t>(request.height));
  put_u32(out, static_cast<std::uint32_t>(request.width));
  put_u32(out, static_cast<std::uint32_t>(request.channels()));
  for (const FrameBuffer& m : request.semantic_maps) put_frame(out, m);
  for (const FrameBuffer& f : request.previous_frames) put_frame(out, f);
  return out;
}

std::vector<std::uint8_t> encode_response(const FrameBuffer& frame) {
  std::vector<std::uint8_t> out(kResponseMagic, kResponseMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(frame.height()));
  put_u32(out, static_cast<std::uint32_t>(frame.width()));
  put_u32(out, static_cast<std::uint32_t>(frame.channels()));
  put_frame(out, frame);
  return out;
}

FrameBuffer decode_response(const std::vector<std::uint8_t>& bytes, int width, int height,
                            int channels) {
  if (bytes.size() < kResponseHeader || !std::equal(kResponseMagic, kResponseMagic + 4, bytes.begin())) {
    throw BackendError("protocol violation: response does not start with MAIR");
  }
  const auto h = static_cast<int>(get_u32(bytes.data() + 4));
  const auto w = static_cast<int>(get_u32(bytes.data() + 8));
  const auto c = static_cast<int>(get_u32(bytes.data() + 12));
  if (w != width || h != height || c != channels) {
    throw BackendError("dimension mismatch: expected " + dims(width, height, channels) +
                       ", got " + dims(w, h, c));
  }
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                            static_cast<std::size_t>(c);
  if (bytes.size() != kResponseHeader + count) {
    throw BackendError("protocol violation: response payload is " +
                       std::to_string(bytes.size() - kResponseHeader) + " bytes, expected " +
                       std::to_string(count));
  }
  std::vector<double> samples(count);
  for (std::size_t i = 0; i < count; ++i) samples[i] = from_byte(bytes[kResponseHeader + i]);
  return FrameBuffer(w, h, c, std::move(samples));
}

}  // namespace wire

// ---------------------------------------------------------------------------

std::vector<std::string> split_command(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

SubprocessBackend::SubprocessBackend(std::vector<std::string> argv, double gmacs_per_frame)
    : gmacs_(gmacs_per_frame) {
  if (argv.empty()) throw BackendError("subprocess backend: empty command");
  // A dead child must surface as EPIPE, not kill the driver.
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw BackendError("pipe failed: " + std::string(std::strerror(errno)));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw BackendError("pipe failed: " + std::string(std::strerror(errno)));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (std::string& a : argv) args.push_back(a.data());
  args.push_back(nullptr);

  const int rc = posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    pid_ = -1;
    throw BackendError("cannot launch '" + argv[0] + "': " + std::strerror(rc));
  }
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

SubprocessBackend::~SubprocessBackend() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0 && !reaped_) {
    // Closing stdin asks the child to finish; reap it either way.
    while (waitpid(pid_, &wait_status_, 0) < 0 && errno == EINTR) {
    }
  }
}

std::string SubprocessBackend::child_status() {
  if (pid_ <= 0) return "child not running";
  if (!reaped_) {
    int status = 0;
    pid_t r = 0;
    // The pipe has closed; give the child a moment to exit before reporting.
    for (int i = 0; i < 200; ++i) {
      r = waitpid(pid_, &status, WNOHANG);
      if (r != 0) break;
      usleep(5000);
    }
    if (r == pid_) {
      reaped_ = true;
      wait_status_ = status;
    } else {
      return "child still running";
    }
  }
  if (WIFEXITED(wait_status_)) {
    return "child exited with status " + std::to_string(WEXITSTATUS(wait_status_));
  }
  if (WIFSIGNALED(wait_status_)) {
    return "child killed by signal " + std::to_string(WTERMSIG(wait_status_));
  }
  return "child stopped";
}

void SubprocessBackend::fail(const std::string& what) {
  throw BackendError(what + " (" + child_status() + ")");
}

void SubprocessBackend::write_all(const std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::write(to_child_, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("write to generator failed: ") + std::strerror(errno));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

bool SubprocessBackend::read_exact(std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::read(from_child_, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("read from generator failed: ") + std::strerror(errno));
    }
    if (n == 0) return false;
    data += n;
    size -= static_cast<std::size_t>(n);
  }
  return true;
}

FrameBuffer SubprocessBackend::generate(const GeneratorRequest& request) {
  if (pid_ <= 0 || reaped_) fail("generator process is not running");
  const std::vector<std::uint8_t> req = wire::encode_request(request);
  write_all(req.data(), req.size());

  std::vector<std::uint8_t> resp(kResponseHeader);
  if (!read_exact(resp.data(), resp.size())) fail("premature EOF in response header");
  if (!std::equal(wire::kResponseMagic, wire::kResponseMagic + 4, resp.begin())) {
    fail("protocol violation: response does not start with MAIR");
  }
  const auto h = static_cast<int>(get_u32(resp.data() + 4));
  const auto w = static_cast<int>(get_u32(resp.data() + 8));
  const auto c = static_cast<int>(get_u32(resp.data() + 12));
  if (w != request.width || h != request.height || c != request.channels()) {
    throw BackendError("dimension mismatch: expected " +
                       dims(request.width, request.height, request.channels()) + ", got " +
                       dims(w, h, c));
  }
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                            static_cast<std::size_t>(c);
  resp.resize(kResponseHeader + count);
  if (!read_exact(resp.data() + kResponseHeader, count)) fail("premature EOF in response payload");
  return wire::decode_response(resp, request.width, request.height, request.channels());
}

// ---------------------------------------------------------------------------

std::vector<GeneratedKey> run_keyframes(const Sequence& semantic, const KeyframeSet& keys,
                                        GeneratorBackend& backend, int p, int d,
                                        const FrameBuffer* initial_frame) {
  if (keys.source_length() != semantic.length()) {
    throw ValidationError("key-frame set covers " + std::to_string(keys.source_length()) +
                          " frames but the semantic sequence has " +
                          std::to_string(semantic.length()));
  }
  if (p < 0) throw ValidationError("temporal context p must be >= 0");
  const int width = semantic.width();
  const int height = semantic.height();
  const FrameBuffer black(width, height, semantic.channels());
  const FrameBuffer& seed = initial_frame != nullptr ? *initial_frame : black;
  if (!seed.same_shape(black)) {
    throw ValidationError("initial frame does not match the semantic sequence shape");
  }

  const auto& idx = keys.indices();
  std::vector<FrameBuffer> low_res;
  low_res.reserve(idx.size());
  for (std::size_t k : idx) low_res.push_back(resize(semantic[k], d, ResizeFilter::box));

  std::vector<GeneratedKey> out;
  out.reserve(idx.size());
  for (std::size_t m = 0; m < idx.size(); ++m) {
    GeneratorRequest req;
    req.p = p;
    req.d = d;
    req.width = width;
    req.height = height;
    for (long j = static_cast<long>(m) - p; j <= static_cast<long>(m); ++j) {
      req.semantic_maps.push_back(low_res[static_cast<std::size_t>(std::max(j, 0L))]);
    }
    for (long j = static_cast<long>(m) - p; j < static_cast<long>(m); ++j) {
      req.previous_frames.push_back(out.empty() ? seed
                                                : out[static_cast<std::size_t>(std::max(j, 0L))].frame);
    }
    try {
      out.push_back({idx[m], backend.generate(req)});
    } catch (const BackendError& e) {
      throw BackendError("key-frame " + std::to_string(idx[m]) + ": " + e.what(), idx[m]);
    }
    const FrameBuffer& got = out.back().frame;
    if (got.width() != width || got.height() != height || got.channels() != semantic.channels()) {
      throw BackendError("key-frame " + std::to_string(idx[m]) + ": backend returned " +
                             dims(got.width(), got.height(), got.channels()) + ", expected " +
                             dims(width, height, semantic.channels()),
                         idx[m]);
    }
  }
  return out;
}

}  // namespace maiv
