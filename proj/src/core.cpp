#include "maiv/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "maiv/error.hpp"

namespace maiv {

namespace fs = std::filesystem;

namespace {

void check_shape(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw ValidationError("frame dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw ValidationError("frame channel count must be 1 or 3, got " +
                          std::to_string(channels));
  }
}

std::string shape_string(const FrameBuffer& f) {
  return std::to_string(f.width()) + "x" + std::to_string(f.height()) + "x" +
         std::to_string(f.channels());
}

}  // namespace

FrameBuffer::FrameBuffer(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  samples_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

FrameBuffer::FrameBuffer(int width, int height, int channels,
                         std::vector<double> samples)
    : width_(width), height_(height), channels_(channels),
      samples_(std::move(samples)) {
  check_shape(width, height, channels);
  if (samples_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw ValidationError("sample count " + std::to_string(samples_.size()) +
                          " does not match " + shape_string(*this));
  }
}

double FrameBuffer::at_clamped(int c, int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return samples_[index(c, x, y)];
}

Sequence::Sequence(std::vector<FrameBuffer> frames, FrameRate rate)
    : frames_(std::move(frames)), rate_(rate) {
  if (frames_.size() < 2) {
    throw ValidationError("a sequence needs at least 2 frames, got " +
                          std::to_string(frames_.size()));
  }
  if (rate_.num == 0 || rate_.den == 0) {
    throw ValidationError("frame rate must be a positive fraction");
  }
  const FrameBuffer& first = frames_.front();
  if (first.empty()) throw ValidationError("sequence frame 0 is empty");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (!frames_[i].same_shape(first)) {
      throw ValidationError("frame " + std::to_string(i) + " is " +
                            shape_string(frames_[i]) + ", expected " +
                            shape_string(first));
    }
  }
}

Sequence Sequence::reversed() const {
  std::vector<FrameBuffer> frames(frames_.rbegin(), frames_.rend());
  return Sequence(std::move(frames), rate_);
}

std::uint8_t to_byte(double v) {
  const double scaled = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(scaled);
}

FrameBuffer quantize(const FrameBuffer& frame) {
  FrameBuffer out = frame;
  for (double& s : out.samples()) s = from_byte(to_byte(s));
  return out;
}

// ---------------------------------------------------------------------------
// Raw container

namespace {

constexpr const char* kRawMagic = "MAIV1";
constexpr std::size_t kMaxHeaderLength = 128;

struct RawHeader {
  int width = 0;
  int height = 0;
  int channels = 0;
  long long frames = 0;
  FrameRate rate;
};

long long parse_uint(const std::string& token, const char* what) {
  if (token.empty() || token.size() > 9 ||
      !std::all_of(token.begin(), token.end(),
                   [](unsigned char ch) { return std::isdigit(ch); })) {
    throw FormatError(std::string("raw header: bad ") + what + " '" + token +
                      "'");
  }
  return std::stoll(token);
}

RawHeader parse_raw_header(const std::string& line) {
  std::istringstream in(line);
  std::string magic, w, h, c, t, rate;
  if (!(in >> magic >> w >> h >> c >> t >> rate) || magic != kRawMagic) {
    throw FormatError("raw header: expected '" + std::string(kRawMagic) +
                      " <width> <height> <channels> <frames> <num>/<den>'");
  }
  std::string extra;
  if (in >> extra) throw FormatError("raw header: trailing token '" + extra + "'");
  const auto slash = rate.find('/');
  if (slash == std::string::npos) {
    throw FormatError("raw header: frame rate must be <num>/<den>");
  }
  RawHeader hdr;
  hdr.width = static_cast<int>(parse_uint(w, "width"));
  hdr.height = static_cast<int>(parse_uint(h, "height"));
  hdr.channels = static_cast<int>(parse_uint(c, "channels"));
  hdr.frames = parse_uint(t, "frame count");
  hdr.rate.num = static_cast<std::uint32_t>(parse_uint(rate.substr(0, slash), "fps numerator"));
  hdr.rate.den = static_cast<std::uint32_t>(parse_uint(rate.substr(slash + 1), "fps denominator"));
  return hdr;
}

std::string raw_header_line(const Sequence& seq) {
  return std::string(kRawMagic) + " " + std::to_string(seq.width()) + " " +
         std::to_string(seq.height()) + " " + std::to_string(seq.channels()) +
         " " + std::to_string(seq.length()) + " " +
         std::to_string(seq.frame_rate().num) + "/" +
         std::to_string(seq.frame_rate().den) + "\n";
}

Sequence load_raw(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  char ch = 0;
  while (in.get(ch) && ch != '\n') {
    line.push_back(ch);
    if (line.size() > kMaxHeaderLength) throw FormatError("raw header too long");
  }
  if (ch != '\n') throw FormatError("raw header is not newline-terminated");

  const RawHeader hdr = parse_raw_header(line);
  if (hdr.width < 1 || hdr.height < 1 || (hdr.channels != 1 && hdr.channels != 3)) {
    throw ValidationError("raw header declares invalid frame shape");
  }
  if (hdr.frames < 2) {
    throw ValidationError("raw header declares " + std::to_string(hdr.frames) +
                          " frames; at least 2 are required");
  }

  const std::size_t frame_bytes = static_cast<std::size_t>(hdr.width) *
                                  static_cast<std::size_t>(hdr.height) *
                                  static_cast<std::size_t>(hdr.channels);
  std::vector<FrameBuffer> frames;
  frames.reserve(static_cast<std::size_t>(hdr.frames));
  std::vector<char> bytes(frame_bytes);
  for (long long t = 0; t < hdr.frames; ++t) {
    if (!in.read(bytes.data(), static_cast<std::streamsize>(frame_bytes))) {
      throw FormatError("raw payload truncated in frame " + std::to_string(t));
    }
    std::vector<double> samples(frame_bytes);
    for (std::size_t i = 0; i < frame_bytes; ++i) {
      samples[i] = from_byte(static_cast<std::uint8_t>(bytes[i]));
    }
    frames.emplace_back(hdr.width, hdr.height, hdr.channels, std::move(samples));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("raw payload has trailing bytes after frame " +
                      std::to_string(hdr.frames - 1));
  }
  return Sequence(std::move(frames), hdr.rate);
}

void save_raw(const Sequence& seq, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << raw_header_line(seq);
  std::vector<char> bytes;
  for (const FrameBuffer& f : seq.frames()) {
    bytes.resize(f.samples().size());
    std::transform(f.samples().begin(), f.samples().end(), bytes.begin(),
                   [](double s) { return static_cast<char>(to_byte(s)); });
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// PNM directory

// Reads the next header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int ch = 0;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (!std::isspace(ch)) break;
  }
  while (ch != EOF && !std::isspace(ch)) {
    tok.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  return tok;
}

FrameBuffer load_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(path.string() + ": not a binary PGM/PPM");
  }
  const std::string w = pnm_token(in), h = pnm_token(in), maxval = pnm_token(in);
  const long long width = parse_uint(w, "PNM width");
  const long long height = parse_uint(h, "PNM height");
  if (parse_uint(maxval, "PNM maxval") != 255) {
    throw FormatError(path.string() + ": only maxval 255 is supported");
  }
  if (width < 1 || height < 1) throw FormatError(path.string() + ": empty image");

  const std::size_t count = static_cast<std::size_t>(width * height) *
                            static_cast<std::size_t>(channels);
  std::vector<char> bytes(count);
  if (!in.read(bytes.data(), static_cast<std::streamsize>(count))) {
    throw FormatError(path.string() + ": pixel data truncated");
  }
  FrameBuffer frame(static_cast<int>(width), static_cast<int>(height), channels);
  // PNM interleaves channels per pixel; the frame is channel-planar.
  const std::size_t pixels = frame.pixel_count();
  for (std::size_t i = 0; i < pixels; ++i) {
    for (int c = 0; c < channels; ++c) {
      frame.samples()[static_cast<std::size_t>(c) * pixels + i] = from_byte(
          static_cast<std::uint8_t>(bytes[i * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)]));
    }
  }
  return frame;
}

void save_pnm(const FrameBuffer& frame, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << (frame.channels() == 1 ? "P5" : "P6") << "\n"
      << frame.width() << " " << frame.height() << "\n255\n";
  const std::size_t pixels = frame.pixel_count();
  const auto channels = static_cast<std::size_t>(frame.channels());
  std::vector<char> bytes(pixels * channels);
  for (std::size_t i = 0; i < pixels; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      bytes[i * channels + c] = static_cast<char>(to_byte(frame.samples()[c * pixels + i]));
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

bool is_frame_name(const fs::path& p) {
  const std::string stem = p.stem().string();
  const std::string ext = p.extension().string();
  return stem.size() == 6 &&
         std::all_of(stem.begin(), stem.end(),
                     [](unsigned char ch) { return std::isdigit(ch); }) &&
         (ext == ".pgm" || ext == ".ppm");
}

Sequence load_pnm_dir(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && is_frame_name(entry.path())) {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<FrameBuffer> frames;
  frames.reserve(files.size());
  for (const fs::path& f : files) frames.push_back(load_pnm(f));
  return Sequence(std::move(frames));
}

void save_pnm_dir(const Sequence& seq, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string());
  }
  const char* ext = seq.channels() == 1 ? "pgm" : "ppm";
  char name[32];
  for (std::size_t t = 0; t < seq.length(); ++t) {
    std::snprintf(name, sizeof(name), "%06zu.%s", t, ext);
    save_pnm(seq[t], dir / name);
  }
}

}  // namespace

Sequence load_sequence(const fs::path& path, VideoFormat format) {
  if (!fs::exists(path)) throw IoError(path.string() + " does not exist");
  return format == VideoFormat::raw ? load_raw(path) : load_pnm_dir(path);
}

void save_sequence(const Sequence& seq, const fs::path& path,
                   VideoFormat format) {
  if (format == VideoFormat::raw) {
    save_raw(seq, path);
  } else {
    save_pnm_dir(seq, path);
  }
}

VideoFormat detect_format(const fs::path& path) {
  std::error_code ec;
  return fs::is_directory(path, ec) ? VideoFormat::pnm_dir : VideoFormat::raw;
}

// ---------------------------------------------------------------------------
// Resampling

FrameBuffer resize(const FrameBuffer& frame, int factor_d, ResizeFilter filter) {
  if (factor_d < 0 || factor_d > 15) {
    throw ValidationError("resize factor d must be in [0, 15], got " +
                          std::to_string(factor_d));
  }
  const int scale = 1 << factor_d;
  if (frame.width() % scale != 0 || frame.height() % scale != 0) {
    throw ValidationError("resize: " + shape_string(frame) +
                          " is not divisible by 2^" + std::to_string(factor_d));
  }
  if (factor_d == 0) return frame;

  const int out_w = frame.width() / scale;
  const int out_h = frame.height() / scale;
  FrameBuffer out(out_w, out_h, frame.channels());
  if (filter == ResizeFilter::box) {
    const double norm = 1.0 / (static_cast<double>(scale) * scale);
    for (int c = 0; c < frame.channels(); ++c) {
      for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
          double sum = 0.0;
          for (int j = 0; j < scale; ++j) {
            for (int i = 0; i < scale; ++i) {
              sum += frame.at(c, x * scale + i, y * scale + j);
            }
          }
          out.at(c, x, y) = sum * norm;
        }
      }
    }
    return out;
  }

  // Bilinear tap at the tile centre, (x + 0.5) * scale - 0.5 in source space.
  const double offset = 0.5 * scale - 0.5;
  const int base = static_cast<int>(std::floor(offset));
  const double frac = offset - base;
  for (int c = 0; c < frame.channels(); ++c) {
    for (int y = 0; y < out_h; ++y) {
      const int sy = y * scale + base;
      for (int x = 0; x < out_w; ++x) {
        const int sx = x * scale + base;
        const double top = frame.at_clamped(c, sx, sy) +
                           frac * (frame.at_clamped(c, sx + 1, sy) - frame.at_clamped(c, sx, sy));
        const double bottom = frame.at_clamped(c, sx, sy + 1) +
                              frac * (frame.at_clamped(c, sx + 1, sy + 1) - frame.at_clamped(c, sx, sy + 1));
        out.at(c, x, y) = top + frac * (bottom - top);
      }
    }
  }
  return out;
}

FrameBuffer upsample(const FrameBuffer& frame, int factor_d,
                     UpsampleFilter filter) {
  if (factor_d < 0 || factor_d > 15) {
    throw ValidationError("upsample factor d must be in [0, 15], got " +
                          std::to_string(factor_d));
  }
  if (factor_d == 0) return frame;
  const int scale = 1 << factor_d;
  FrameBuffer out(frame.width() * scale, frame.height() * scale, frame.channels());
  for (int c = 0; c < frame.channels(); ++c) {
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        if (filter == UpsampleFilter::nearest) {
          out.at(c, x, y) = frame.at(c, x / scale, y / scale);
          continue;
        }
        const double sx = (x + 0.5) / scale - 0.5;
        const double sy = (y + 0.5) / scale - 0.5;
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0;
        const double fy = sy - y0;
        const double top = frame.at_clamped(c, x0, y0) +
                           fx * (frame.at_clamped(c, x0 + 1, y0) - frame.at_clamped(c, x0, y0));
        const double bottom = frame.at_clamped(c, x0, y0 + 1) +
                              fx * (frame.at_clamped(c, x0 + 1, y0 + 1) - frame.at_clamped(c, x0, y0 + 1));
        out.at(c, x, y) = top + fy * (bottom - top);
      }
    }
  }
  return out;
}

}  // namespace maiv
