#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "maiv/core.hpp"
#include "maiv/error.hpp"

namespace fs = std::filesystem;
using namespace maiv;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("maiv_core_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

Sequence random_sequence(int w, int h, int c, std::size_t t, std::uint64_t seed) {
  std::vector<FrameBuffer> frames;
  for (std::size_t i = 0; i < t; ++i) frames.push_back(quantize(fixtures::noise_frame(w, h, seed + i, c)));
  return Sequence(std::move(frames), {25, 2});
}

}  // namespace

TEST(FrameBuffer, RejectsBadShapes) {
  EXPECT_THROW(FrameBuffer(0, 4, 1), ValidationError);
  EXPECT_THROW(FrameBuffer(4, 4, 2), ValidationError);
  EXPECT_THROW(FrameBuffer(4, 4, 1, std::vector<double>(15)), ValidationError);
}

TEST(FrameBuffer, ClampedReadsReplicateEdges) {
  FrameBuffer f(2, 2, 1, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(f.at_clamped(0, -5, -5), 0.1);
  EXPECT_EQ(f.at_clamped(0, 9, 0), 0.2);
  EXPECT_EQ(f.at_clamped(0, 9, 9), 0.4);
}

TEST(Sequence, ValidatesLengthAndShape) {
  EXPECT_THROW(Sequence({FrameBuffer(16, 16, 1)}), ValidationError);
  EXPECT_THROW(Sequence({FrameBuffer(16, 16, 1), FrameBuffer(16, 8, 1)}), ValidationError);
  EXPECT_THROW(Sequence({FrameBuffer(16, 16, 1), FrameBuffer(16, 16, 3)}), ValidationError);
}

TEST(Raw, AllOnesFileLoadsAsUnitIntensity) {
  TempDir dir;
  const fs::path p = dir.path() / "ones.raw";
  write_bytes(p, "MAIV1 16 16 1 2 30/1\n" + std::string(2 * 16 * 16, '\xff'));
  const Sequence seq = load_sequence(p, VideoFormat::raw);
  ASSERT_EQ(seq.length(), 2u);
  for (const FrameBuffer& f : seq.frames()) {
    for (double s : f.samples()) EXPECT_EQ(s, 1.0);
  }
  EXPECT_EQ(seq.frame_rate(), (FrameRate{30, 1}));
}

TEST(Raw, MalformedHeaderIsFormatError) {
  TempDir dir;
  const fs::path p = dir.path() / "bad.raw";
  write_bytes(p, "MAIV2 16 16 1 2 30/1\n" + std::string(512, '\0'));
  EXPECT_THROW(load_sequence(p, VideoFormat::raw), FormatError);
  write_bytes(p, "MAIV1 16 16 1 2 30\n" + std::string(512, '\0'));
  EXPECT_THROW(load_sequence(p, VideoFormat::raw), FormatError);
  write_bytes(p, "MAIV1 16 16 1 2 30/1\n" + std::string(511, '\0'));
  EXPECT_THROW(load_sequence(p, VideoFormat::raw), FormatError);
  write_bytes(p, "MAIV1 16 16 1 2 30/1\n" + std::string(513, '\0'));
  EXPECT_THROW(load_sequence(p, VideoFormat::raw), FormatError);
}

TEST(Raw, InvalidDeclaredShapeIsValidationError) {
  TempDir dir;
  const fs::path p = dir.path() / "short.raw";
  write_bytes(p, "MAIV1 16 16 1 1 30/1\n" + std::string(256, '\0'));
  EXPECT_THROW(load_sequence(p, VideoFormat::raw), ValidationError);
  write_bytes(p, "MAIV1 16 16 2 2 30/1\n" + std::string(1024, '\0'));
  EXPECT_THROW(load_sequence(p, VideoFormat::raw), ValidationError);
}

TEST(Raw, FileSizeIsHeaderPlusPayload) {
  TempDir dir;
  const int w = 20, h = 12, c = 3;
  std::vector<FrameBuffer> frames;
  for (int t = 0; t < 2; ++t) {
    frames.push_back(fixtures::sample(w, h, [](double x, double) { return x / 19.0; }, c));
  }
  const fs::path p = dir.path() / "ramp.raw";
  save_sequence(Sequence(frames), p, VideoFormat::raw);
  const std::string header = "MAIV1 20 12 3 2 30/1\n";
  EXPECT_EQ(fs::file_size(p), header.size() + 2u * w * h * c);
}

TEST(Raw, MissingPathIsIoError) {
  EXPECT_THROW(load_sequence("/nonexistent/maiv.raw", VideoFormat::raw), IoError);
  const Sequence seq = random_sequence(4, 4, 1, 2, 1);
  EXPECT_THROW(save_sequence(seq, "/nonexistent/dir/out.raw", VideoFormat::raw), IoError);
}

// Round trip is bit-exact for 8-bit-quantized content in both formats.
TEST(RoundTrip, PropertyOverRandomSequences) {
  TempDir dir;
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 12; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 40);
    const int h = 1 + static_cast<int>(rng() % 40);
    const int c = rng() % 2 == 0 ? 1 : 3;
    const std::size_t t = 2 + rng() % 4;
    const Sequence seq = random_sequence(w, h, c, t, rng());

    const fs::path raw = dir.path() / ("seq" + std::to_string(trial) + ".raw");
    save_sequence(seq, raw, VideoFormat::raw);
    EXPECT_EQ(load_sequence(raw, VideoFormat::raw), seq);

    const fs::path pnm = dir.path() / ("seq" + std::to_string(trial));
    save_sequence(seq, pnm, VideoFormat::pnm_dir);
    const Sequence back = load_sequence(pnm, VideoFormat::pnm_dir);
    EXPECT_TRUE(std::equal(back.frames().begin(), back.frames().end(), seq.frames().begin()));
  }
}

TEST(PnmDir, ThreeFramesOfPgm) {
  TempDir dir;
  const Sequence seq = random_sequence(32, 32, 1, 3, 7);
  save_sequence(seq, dir.path() / "v", VideoFormat::pnm_dir);
  EXPECT_TRUE(fs::exists(dir.path() / "v" / "000002.pgm"));
  const Sequence back = load_sequence(dir.path() / "v", VideoFormat::pnm_dir);
  EXPECT_EQ(back.length(), 3u);
  EXPECT_EQ(back.channels(), 1);
  EXPECT_EQ(back.width(), 32);
  EXPECT_EQ(detect_format(dir.path() / "v"), VideoFormat::pnm_dir);
}

TEST(PnmDir, InconsistentFrameDimsIsValidationError) {
  TempDir dir;
  write_bytes(dir.path() / "000000.pgm", "P5\n4 4\n255\n" + std::string(16, 'a'));
  write_bytes(dir.path() / "000001.pgm", "P5\n# comment\n4 2\n255\n" + std::string(8, 'a'));
  EXPECT_THROW(load_sequence(dir.path(), VideoFormat::pnm_dir), ValidationError);
}

TEST(PnmDir, NonBinaryPnmIsFormatError) {
  TempDir dir;
  write_bytes(dir.path() / "000000.pgm", "P2\n1 1\n255\n0\n");
  write_bytes(dir.path() / "000001.pgm", "P2\n1 1\n255\n0\n");
  EXPECT_THROW(load_sequence(dir.path(), VideoFormat::pnm_dir), FormatError);
}

TEST(Resize, ConstantFrameStaysConstant) {
  const FrameBuffer f(32, 32, 1, 0.5);
  for (ResizeFilter filter : {ResizeFilter::box, ResizeFilter::bilinear}) {
    const FrameBuffer r = resize(f, 1, filter);
    EXPECT_EQ(r.width(), 16);
    EXPECT_EQ(r.height(), 16);
    for (double s : r.samples()) EXPECT_EQ(s, 0.5);
  }
}

TEST(Resize, TwoByTwoAverages) {
  const FrameBuffer f(2, 2, 1, std::vector<double>{0, 1, 1, 0});
  const FrameBuffer r = resize(f, 1, ResizeFilter::box);
  ASSERT_EQ(r.pixel_count(), 1u);
  EXPECT_EQ(r.at(0, 0, 0), 0.5);
}

TEST(Resize, HalvesEachSide) {
  const FrameBuffer r = resize(FrameBuffer(512, 512, 3), 1);
  EXPECT_EQ(r.width(), 256);
  EXPECT_EQ(r.height(), 256);
  EXPECT_EQ(resize(FrameBuffer(512, 256, 1), 1).height(), 128);
}

TEST(Resize, NonDivisibleIsValidationError) {
  EXPECT_THROW(resize(FrameBuffer(17, 16, 1), 1), ValidationError);
  EXPECT_THROW(resize(FrameBuffer(16, 16, 1), 5), ValidationError);
}

TEST(Resize, IdentityAtZeroAndMeanPreservingBox) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = static_cast<int>(rng() % 3);
    const int scale = 1 << d;
    const int w = scale * (1 + static_cast<int>(rng() % 8));
    const int h = scale * (1 + static_cast<int>(rng() % 8));
    const FrameBuffer f = fixtures::noise_frame(w, h, rng(), 3);
    EXPECT_EQ(resize(f, 0, ResizeFilter::box), f);
    EXPECT_EQ(resize(f, 0, ResizeFilter::bilinear), f);

    const FrameBuffer r = resize(f, d, ResizeFilter::box);
    double a = 0, b = 0;
    for (double s : f.samples()) a += s;
    for (double s : r.samples()) b += s;
    EXPECT_NEAR(a / f.samples().size(), b / r.samples().size(), 1e-12);
  }
}

TEST(Resize, BilinearMatchesBoxAtFactorTwo) {
  const FrameBuffer f = fixtures::noise_frame(24, 16, 9);
  EXPECT_LT(fixtures::max_abs_diff(resize(f, 1, ResizeFilter::box),
                                  resize(f, 1, ResizeFilter::bilinear)),
            1e-15);
}

TEST(Upsample, NearestReplicates) {
  const FrameBuffer one(1, 1, 1, 0.3);
  const FrameBuffer up = upsample(one, 1, UpsampleFilter::nearest);
  EXPECT_EQ(up, FrameBuffer(2, 2, 1, 0.3));
}
