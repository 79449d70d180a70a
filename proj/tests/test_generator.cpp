#include <gtest/gtest.h>

#include <csignal>
#include <random>

#include <sys/wait.h>

#include "fixtures.hpp"
#include "maiv/error.hpp"
#include "maiv/generator.hpp"

using namespace maiv;

namespace {

// Byte-exact maps survive the wire unchanged.
GeneratorRequest request_for(const FrameBuffer& full_map, int p = 1, int d = 1, bool byte_exact = false) {
  GeneratorRequest req;
  req.p = p;
  req.d = d;
  req.width = full_map.width();
  req.height = full_map.height();
  FrameBuffer low = resize(full_map, d, ResizeFilter::box);
  if (byte_exact) low = quantize(low);
  req.semantic_maps.assign(static_cast<std::size_t>(p) + 1, low);
  req.previous_frames.assign(static_cast<std::size_t>(p), FrameBuffer(req.width, req.height, full_map.channels()));
  return req;
}

Sequence quantized_noise(int w, int h, int c, std::size_t t, std::uint64_t seed) {
  std::vector<FrameBuffer> frames;
  for (std::size_t i = 0; i < t; ++i) frames.push_back(quantize(fixtures::noise_frame(w, h, seed + i, c)));
  return Sequence(std::move(frames));
}

// Records every request and answers with the oracle.
class RecordingBackend final : public GeneratorBackend {
 public:
  FrameBuffer generate(const GeneratorRequest& request) override {
    requests.push_back(request);
    // Fold the previous frame in so the recurrence is observable.
    FrameBuffer out = oracle_generate(request);
    const FrameBuffer& prev = request.previous_frames.back();
    for (std::size_t i = 0; i < out.samples().size(); ++i) {
      out.samples()[i] = 0.5 * (out.samples()[i] + prev.samples()[i]);
    }
    return out;
  }
  double macs_per_frame() const override { return 1.0; }

  std::vector<GeneratorRequest> requests;
};

bool same_request(const GeneratorRequest& a, const GeneratorRequest& b) {
  return a.p == b.p && a.d == b.d && a.width == b.width && a.height == b.height &&
         a.semantic_maps == b.semantic_maps && a.previous_frames == b.previous_frames;
}

}  // namespace

TEST(Oracle, ConstantMapUpsamples) {
  GeneratorRequest req = request_for(FrameBuffer(16, 16, 1, 0.5));
  ASSERT_EQ(req.semantic_maps[0].width(), 8);
  for (UpsampleFilter mode : {UpsampleFilter::nearest, UpsampleFilter::bilinear}) {
    const FrameBuffer out = oracle_generate(req, mode);
    EXPECT_EQ(out, FrameBuffer(16, 16, 1, 0.5));
  }
}

TEST(Oracle, SinglePixelMapNearest) {
  GeneratorRequest req;
  req.width = req.height = 2;
  req.semantic_maps = {FrameBuffer(1, 1, 3, 0.2), FrameBuffer(1, 1, 3, 0.7)};
  req.previous_frames = {FrameBuffer(2, 2, 3)};
  EXPECT_EQ(oracle_generate(req), FrameBuffer(2, 2, 3, 0.7));
}

TEST(Oracle, CheckerboardDownUpRoundTrip) {
  const FrameBuffer board = fixtures::sample(8, 8, [](double x, double y) {
    return (static_cast<int>(x) + static_cast<int>(y)) % 2 == 0 ? 0.0 : 1.0;
  });
  GeneratorRequest req;
  req.width = req.height = 16;
  req.semantic_maps = {board, board};
  req.previous_frames = {FrameBuffer(16, 16, 1)};
  EXPECT_EQ(resize(oracle_generate(req), 1, ResizeFilter::box), board);
}

TEST(GeneratorRequest, ValidationRejectsBadShapes) {
  GeneratorRequest ok = request_for(FrameBuffer(16, 16, 3, 0.1), 2, 1);
  EXPECT_NO_THROW(ok.validate());

  GeneratorRequest few_maps = ok;
  few_maps.semantic_maps.pop_back();
  EXPECT_THROW(few_maps.validate(), ValidationError);

  GeneratorRequest few_frames = ok;
  few_frames.previous_frames.pop_back();
  EXPECT_THROW(few_frames.validate(), ValidationError);

  GeneratorRequest wrong_low = ok;
  wrong_low.semantic_maps[1] = FrameBuffer(16, 16, 3);
  EXPECT_THROW(wrong_low.validate(), ValidationError);

  GeneratorRequest wrong_full = ok;
  wrong_full.previous_frames[0] = FrameBuffer(8, 8, 3);
  EXPECT_THROW(wrong_full.validate(), ValidationError);

  GeneratorRequest indivisible = ok;
  indivisible.width = 17;
  EXPECT_THROW(indivisible.validate(), ValidationError);
  EXPECT_THROW(oracle_generate(indivisible), ValidationError);
}

TEST(Wire, RequestLayout) {
  GeneratorRequest req;
  req.p = 1;
  req.d = 1;
  req.width = 4;
  req.height = 2;
  req.semantic_maps = {FrameBuffer(2, 1, 1, 0.0), FrameBuffer(2, 1, 1, 1.0)};
  req.previous_frames = {FrameBuffer(4, 2, 1, 128 / 255.0)};
  const std::vector<std::uint8_t> bytes = wire::encode_request(req);
  const std::vector<std::uint8_t> expected{
      'M', 'A', 'I', 'G', 1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 4, 0, 0, 0, 1, 0, 0, 0,
      0,   0,   255, 255, 128, 128, 128, 128, 128, 128, 128, 128};
  EXPECT_EQ(bytes, expected);
}

TEST(Wire, ResponseRoundTripAndErrors) {
  const FrameBuffer f = quantize(fixtures::noise_frame(5, 3, 2, 3));
  const std::vector<std::uint8_t> bytes = wire::encode_response(f);
  ASSERT_EQ(bytes.size(), 16u + 45u);
  EXPECT_EQ(wire::decode_response(bytes, 5, 3, 3), f);
  EXPECT_THROW(wire::decode_response(bytes, 4, 3, 3), BackendError);
  std::vector<std::uint8_t> bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(wire::decode_response(bad, 5, 3, 3), BackendError);
  bad = bytes;
  bad.pop_back();
  EXPECT_THROW(wire::decode_response(bad, 5, 3, 3), BackendError);
}

TEST(SplitCommand, Whitespace) {
  EXPECT_EQ(split_command("  a  b\tc "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(split_command("   ").empty());
}

TEST(Subprocess, EchoMatchesOracle) {
  SubprocessBackend backend({MAIV_ECHO_BACKEND});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const int c = i % 2 == 0 ? 3 : 1;
    GeneratorRequest req = request_for(fixtures::noise_frame(32, 16, rng(), c), 1 + i % 2, 1 + i % 2, true);
    EXPECT_EQ(backend.generate(req), oracle_generate(req));
  }
  EXPECT_EQ(backend.macs_per_frame(), 282.0);
}

TEST(Subprocess, ChildExitingMidFrameIsBackendError) {
  SubprocessBackend backend({MAIV_ECHO_BACKEND, "--exit-after", "2"});
  const GeneratorRequest req = request_for(FrameBuffer(16, 16, 1, 0.4));
  EXPECT_NO_THROW(backend.generate(req));
  EXPECT_NO_THROW(backend.generate(req));
  try {
    backend.generate(req);
    FAIL() << "expected a backend error";
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("premature EOF"), std::string::npos) << e.what();
  }
}

TEST(Subprocess, WrongDimsNamesExpectedAndGot) {
  SubprocessBackend backend({MAIV_ECHO_BACKEND, "--wrong-dims"});
  try {
    backend.generate(request_for(FrameBuffer(16, 8, 1, 0.4)));
    FAIL() << "expected a backend error";
  } catch (const BackendError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("expected 16x8x1"), std::string::npos) << what;
    EXPECT_NE(what.find("got 17x8x1"), std::string::npos) << what;
  }
}

TEST(Subprocess, MissingExecutableIsBackendError) {
  EXPECT_THROW(
      {
        SubprocessBackend backend({"/nonexistent/maiv-generator"});
        backend.generate(request_for(FrameBuffer(16, 16, 1)));
      },
      BackendError);
}

TEST(Subprocess, KilledChildIsBackendError) {
  SubprocessBackend backend({MAIV_ECHO_BACKEND});
  const GeneratorRequest req = request_for(FrameBuffer(64, 64, 3, 0.25));
  EXPECT_NO_THROW(backend.generate(req));
  ASSERT_EQ(::kill(backend.pid(), SIGKILL), 0);
  EXPECT_THROW(backend.generate(req), BackendError);
}

TEST(RunKeyframes, AllKeysEqualsFrameByFrameOracle) {
  const Sequence sem = quantized_noise(16, 16, 3, 5, 40);
  OracleBackend oracle;
  const auto out = run_keyframes(sem, KeyframeSet({0, 1, 2, 3, 4}, 5), oracle);
  ASSERT_EQ(out.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(out[i].index, i);
    EXPECT_EQ(out[i].frame, upsample(resize(sem[i], 1, ResizeFilter::box), 1, UpsampleFilter::nearest));
  }
}

TEST(RunKeyframes, InvocationCountEqualsKeyCount) {
  const Sequence sem = quantized_noise(16, 16, 1, 9, 1);
  RecordingBackend rec;
  run_keyframes(sem, KeyframeSet({0, 8}, 9), rec);
  EXPECT_EQ(rec.requests.size(), 2u);
  rec.requests.clear();
  run_keyframes(sem, KeyframeSet({0, 3, 4, 8}, 9), rec, 2, 2);
  EXPECT_EQ(rec.requests.size(), 4u);
}

TEST(RunKeyframes, ConstantInputGivesIdenticalKeys) {
  const Sequence sem(std::vector<FrameBuffer>(7, FrameBuffer(32, 16, 3, 0.6)));
  OracleBackend oracle;
  const auto out = run_keyframes(sem, KeyframeSet({0, 2, 6}, 7), oracle);
  for (const GeneratedKey& k : out) EXPECT_EQ(k.frame, out[0].frame);
}

TEST(RunKeyframes, ContextUsesKeyIndicesAndReplicatesAtStart) {
  const Sequence sem = quantized_noise(16, 16, 1, 10, 77);
  const FrameBuffer initial(16, 16, 1, 0.9);
  RecordingBackend rec;
  const auto out = run_keyframes(sem, KeyframeSet({0, 4, 7, 9}, 10), rec, 2, 1, &initial);
  auto low = [&](std::size_t i) { return resize(sem[i], 1, ResizeFilter::box); };
  ASSERT_EQ(rec.requests.size(), 4u);
  EXPECT_EQ(rec.requests[0].semantic_maps, (std::vector<FrameBuffer>{low(0), low(0), low(0)}));
  EXPECT_EQ(rec.requests[0].previous_frames, (std::vector<FrameBuffer>{initial, initial}));
  EXPECT_EQ(rec.requests[1].semantic_maps, (std::vector<FrameBuffer>{low(0), low(0), low(4)}));
  EXPECT_EQ(rec.requests[1].previous_frames, (std::vector<FrameBuffer>{out[0].frame, out[0].frame}));
  EXPECT_EQ(rec.requests[3].semantic_maps, (std::vector<FrameBuffer>{low(4), low(7), low(9)}));
  EXPECT_EQ(rec.requests[3].previous_frames, (std::vector<FrameBuffer>{out[1].frame, out[2].frame}));
}

TEST(RunKeyframes, FirstKeyWithoutInitialFrameSeesBlack) {
  const Sequence sem = quantized_noise(16, 16, 1, 3, 5);
  RecordingBackend rec;
  run_keyframes(sem, KeyframeSet({0, 2}, 3), rec);
  EXPECT_EQ(rec.requests[0].previous_frames, (std::vector<FrameBuffer>{FrameBuffer(16, 16, 1)}));
}

// Removing a key leaves every earlier request untouched.
TEST(RunKeyframes, PrefixProperty) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t t = 4 + rng() % 8;
    const Sequence sem = quantized_noise(16, 16, 1, t, rng());
    std::vector<std::size_t> idx{0};
    for (std::size_t i = 1; i + 1 < t; ++i) {
      if (rng() % 2 == 0) idx.push_back(i);
    }
    idx.push_back(t - 1);
    if (idx.size() < 3) continue;
    const std::size_t drop = 1 + rng() % (idx.size() - 2);
    std::vector<std::size_t> fewer = idx;
    fewer.erase(fewer.begin() + static_cast<long>(drop));

    const int p = 1 + static_cast<int>(rng() % 2);
    RecordingBackend full, reduced;
    run_keyframes(sem, KeyframeSet(idx, t), full, p);
    run_keyframes(sem, KeyframeSet(fewer, t), reduced, p);
    for (std::size_t m = 0; m < drop; ++m) {
      EXPECT_TRUE(same_request(full.requests[m], reduced.requests[m])) << trial << " " << m;
    }
  }
}

TEST(RunKeyframes, BackendErrorsCarryTheKeyIndex) {
  const Sequence sem = quantized_noise(16, 16, 1, 6, 2);
  SubprocessBackend backend({MAIV_ECHO_BACKEND, "--exit-after", "1"});
  try {
    run_keyframes(sem, KeyframeSet({0, 3, 5}, 6), backend);
    FAIL() << "expected a backend error";
  } catch (const BackendError& e) {
    ASSERT_TRUE(e.frame_index().has_value());
    EXPECT_EQ(*e.frame_index(), 3u);
  }
}

TEST(RunKeyframes, RejectsMismatchedInputs) {
  const Sequence sem = quantized_noise(16, 16, 1, 4, 2);
  OracleBackend oracle;
  EXPECT_THROW(run_keyframes(sem, KeyframeSet({0, 4}, 5), oracle), ValidationError);
  const FrameBuffer wrong(8, 8, 1);
  EXPECT_THROW(run_keyframes(sem, KeyframeSet({0, 3}, 4), oracle, 1, 1, &wrong), ValidationError);
  EXPECT_THROW(run_keyframes(sem, KeyframeSet({0, 3}, 4), oracle, 1, 5), ValidationError);
}
