#include "maiv/cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "maiv/compensate.hpp"
#include "maiv/config.hpp"
#include "maiv/core.hpp"
#include "maiv/error.hpp"
#include "maiv/generator.hpp"
#include "maiv/keyframe.hpp"
#include "maiv/metrics.hpp"
#include "maiv/serialize.hpp"

namespace maiv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Pipeline settings gathered from --config plus per-key flag overrides.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;

  PipelineConfig resolve() const {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : PipelineConfig::from_file(config_path);
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    cfg.validate();
    return cfg;
  }
};

void add_override(CLI::App* cmd, ConfigFlags& flags, const std::string& flag,
                  const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&flags, key](const std::string& v) { flags.overrides[key] = v; }, help);
}

void add_pipeline_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key = value config file; flags override it");
  add_override(cmd, flags, "--window", "window", "selector sliding window (odd)");
  add_override(cmd, flags, "--strategy", "strategy", "peaks | fixed | random");
  add_override(cmd, flags, "--gap", "gap", "fixed strategy interval");
  add_override(cmd, flags, "--count", "count", "random strategy key-frame count");
  add_override(cmd, flags, "--seed", "seed", "random strategy seed");
}

void add_synthesis_flags(CLI::App* cmd, ConfigFlags& flags) {
  add_override(cmd, flags, "-d,--downsample", "d", "semantic downsample exponent d");
  add_override(cmd, flags, "-p,--context", "p", "temporal context length p");
  add_override(cmd, flags, "--method", "method", "obmc | linear");
  add_override(cmd, flags, "--backend", "backend", "oracle | subprocess");
  add_override(cmd, flags, "--backend-command", "backend_command", "generator command line");
  add_override(cmd, flags, "--oracle-mode", "oracle_mode", "upsample-nearest | upsample-bilinear");
  add_override(cmd, flags, "--search-range", "search_range", "motion search range in pixels");
  add_override(cmd, flags, "--early-exit", "early_exit_threshold", "per-pixel SAD early exit");
  add_override(cmd, flags, "--block-size", "block_size", "motion block size");
  add_override(cmd, flags, "--generator-gmacs", "generator_gmacs", "G-MACs per generated frame");
}

VideoFormat parse_format(const std::string& name, const fs::path& path) {
  if (name.empty() || name == "auto") return detect_format(path);
  if (name == "raw") return VideoFormat::raw;
  if (name == "pnm-dir" || name == "pnm") return VideoFormat::pnm_dir;
  throw ValidationError("unknown video format '" + name + "'");
}

KeyframeSet run_strategy(const Sequence& seq, const PipelineConfig& cfg) {
  switch (cfg.strategy) {
    case KeyStrategy::peaks: return select_keyframes(residual_curve(seq), cfg.window);
    case KeyStrategy::fixed: return select_fixed_gap(seq.length(), cfg.gap);
    case KeyStrategy::random: return select_random_gap(seq.length(), cfg.count, cfg.seed);
  }
  throw ValidationError("unknown strategy");
}

void emit(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << "\n";
    return;
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << j.dump(2) << "\n";
  if (!file) throw IoError("write failed for " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::vector<FrameBuffer> gather(const Sequence& seq, const std::vector<std::size_t>& indices) {
  std::vector<FrameBuffer> out;
  for (std::size_t i : indices) out.push_back(seq[i]);
  return out;
}

std::unique_ptr<GeneratorBackend> make_backend(const PipelineConfig& cfg) {
  if (cfg.backend == BackendKind::oracle) {
    return std::make_unique<OracleBackend>(cfg.oracle_mode, cfg.generator_gmacs);
  }
  return std::make_unique<SubprocessBackend>(split_command(cfg.backend_command), cfg.generator_gmacs);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Motion-aware video synthesis: key-frame selection, sparse generation and "
               "motion-compensated reconstruction"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string input, output, format = "auto", output_format = "raw", keys_path, report_path;

  // select-keyframes
  auto* select = app.add_subcommand("select-keyframes", "choose key-frames of a sequence");
  select->add_option("-i,--input", input, "input sequence")->required();
  select->add_option("--format", format, "raw | pnm-dir | auto");
  select->add_option("-o,--output", output, "key-frame JSON (default stdout)");
  add_pipeline_flags(select, flags);

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "generate key-frames and interpolate the rest");
  synth->add_option("-i,--input", input, "semantic map sequence")->required();
  synth->add_option("--format", format, "input format: raw | pnm-dir | auto");
  synth->add_option("-o,--output", output, "output video")->required();
  synth->add_option("--output-format", output_format, "raw | pnm-dir");
  synth->add_option("--report", report_path, "cost report JSON (default stdout)");
  synth->add_option("--keys-output", keys_path, "also write the chosen key-frames");
  add_pipeline_flags(synth, flags);
  add_synthesis_flags(synth, flags);

  // interpolate
  auto* interp = app.add_subcommand("interpolate",
                                    "rebuild a video from its key-frames and score the result");
  interp->add_option("-i,--input", input, "reference video")->required();
  interp->add_option("--format", format, "raw | pnm-dir | auto");
  interp->add_option("--keys", keys_path, "key-frame JSON (default: run the strategy)");
  interp->add_option("-o,--output", output, "write the reconstruction here");
  interp->add_option("--output-format", output_format, "raw | pnm-dir");
  interp->add_option("--report", report_path, "metrics JSON (default stdout)");
  add_pipeline_flags(interp, flags);
  add_synthesis_flags(interp, flags);

  // evaluate
  std::string pred_path, ref_path;
  LossWeights weights;
  auto* eval = app.add_subcommand("evaluate", "distillation losses between two videos");
  eval->add_option("--pred", pred_path, "student / predicted video")->required();
  eval->add_option("--reference", ref_path, "teacher / reference video")->required();
  eval->add_option("--format", format, "raw | pnm-dir | auto");
  eval->add_option("--keys", keys_path, "key-frame JSON selecting the temporal pairs");
  eval->add_option("--alpha", weights.alpha, "local temporal weight");
  eval->add_option("--beta", weights.beta, "global temporal weight");
  eval->add_option("--sigma", weights.sigma, "spatial weight");
  eval->add_option("--gamma", weights.gamma, "temporal weight");
  eval->add_option("-o,--output", output, "metrics JSON (default stdout)");

  // budget
  std::size_t frames = 0;
  int width = 0, height = 0;
  MacModel model;
  auto* budget = app.add_subcommand("budget", "MAC cost of a key-frame plan");
  budget->add_option("--frames", frames, "sequence length T");
  budget->add_option("--width", width, "frame width")->required();
  budget->add_option("--height", height, "frame height")->required();
  budget->add_option("--keys", keys_path, "key-frame JSON");
  budget->add_option("-i,--input", input, "sequence to run the strategy on");
  budget->add_option("--format", format, "raw | pnm-dir | auto");
  budget->add_option("--epzs-macs-per-block", model.epzs_macs_per_block);
  budget->add_option("--obmc-macs-per-pixel", model.obmc_macs_per_pixel);
  budget->add_option("-o,--output", output, "cost report JSON (default stdout)");
  add_pipeline_flags(budget, flags);
  add_override(budget, flags, "--generator-gmacs", "generator_gmacs", "G-MACs per generated frame");
  add_override(budget, flags, "--block-size", "block_size", "motion block size");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*select) {
      const PipelineConfig cfg = flags.resolve();
      const Sequence seq = load_sequence(input, parse_format(format, input));
      emit(to_json(run_strategy(seq, cfg)), output, out);
    } else if (*synth) {
      const PipelineConfig cfg = flags.resolve();
      const Sequence semantic = load_sequence(input, parse_format(format, input));
      const KeyframeSet keys = run_strategy(semantic, cfg);
      if (!keys_path.empty()) emit(to_json(keys), keys_path, out);

      const auto backend = make_backend(cfg);
      const auto generated = run_keyframes(semantic, keys, *backend, cfg.p, cfg.d);
      std::vector<KeyFrame> key_frames;
      for (const auto& g : generated) key_frames.push_back({g.index, g.frame});
      const Sequence video = fill_sequence(key_frames, semantic.length(), cfg.method,
                                           cfg.search, cfg.obmc, semantic.frame_rate());
      save_sequence(video, output, parse_format(output_format, output));

      MacModel costs;
      costs.block_size = cfg.search.block_size;
      emit(to_json(account_macs(keys, semantic.width(), semantic.height(),
                                backend->macs_per_frame(), costs)),
           report_path, out);
    } else if (*interp) {
      const PipelineConfig cfg = flags.resolve();
      const Sequence video = load_sequence(input, parse_format(format, input));
      const KeyframeSet keys =
          keys_path.empty() ? run_strategy(video, cfg) : keyframes_from_json(read_json(keys_path));
      if (keys.source_length() != video.length()) {
        throw ValidationError("key-frame set length does not match the video");
      }
      std::vector<KeyFrame> key_frames;
      for (std::size_t k : keys.indices()) key_frames.push_back({k, video[k]});
      const Sequence rebuilt = fill_sequence(key_frames, video.length(), cfg.method, cfg.search,
                                             cfg.obmc, video.frame_rate());
      if (!output.empty()) save_sequence(rebuilt, output, parse_format(output_format, output));

      double total = 0.0;
      json per_frame = json::array();
      for (std::size_t t = 0; t < video.length(); ++t) {
        const double e = mse_frames(rebuilt[t], video[t]);
        total += e;
        per_frame.push_back(e);
      }
      const double mean = total / static_cast<double>(video.length());
      emit(json{{"method", cfg.method == InterpolationMethod::obmc ? "obmc" : "linear"},
                {"keys", to_json(keys)},
                {"mse", mean},
                {"psnr", mean == 0.0 ? json(nullptr) : json(-10.0 * std::log10(mean))},
                {"per_frame_mse", per_frame}},
           report_path, out);
    } else if (*eval) {
      weights.validate();
      const Sequence pred = load_sequence(pred_path, parse_format(format, pred_path));
      const Sequence ref = load_sequence(ref_path, parse_format(format, ref_path));
      if (pred.length() != ref.length()) {
        throw ValidationError("pred and reference lengths differ");
      }
      const ReferenceExtractor extractor;
      std::vector<std::size_t> pairs;
      if (keys_path.empty()) {
        for (std::size_t t = 0; t < pred.length(); ++t) pairs.push_back(t);
      } else {
        pairs = keyframes_from_json(read_json(keys_path)).indices();
        if (pairs.back() >= pred.length()) throw ValidationError("key index beyond the video");
      }
      const auto student = gather(pred, pairs);
      const auto teacher = gather(ref, pairs);

      double mse = 0.0;
      for (std::size_t t = 0; t < pred.length(); ++t) mse += mse_frames(pred[t], ref[t]);
      mse /= static_cast<double>(pred.length());
      const double skd = loss_skd(pred.frames(), ref.frames(), extractor);
      const double ltkd = loss_ltkd(student, teacher, extractor);
      const double gtkd = loss_gtkd(student, teacher, extractor);
      const double tkd = combine_tkd(ltkd, gtkd, weights);
      emit(json{{"mse", mse},
                {"psnr", mse == 0.0 ? json(nullptr) : json(-10.0 * std::log10(mse))},
                {"loss_skd", skd},
                {"loss_ltkd", ltkd},
                {"loss_gtkd", gtkd},
                {"loss_tkd", tkd},
                {"loss_kd", loss_kd(skd, tkd, weights)},
                {"weights",
                 {{"alpha", weights.alpha},
                  {"beta", weights.beta},
                  {"sigma", weights.sigma},
                  {"gamma", weights.gamma}}}},
           output, out);
    } else if (*budget) {
      const PipelineConfig cfg = flags.resolve();
      std::optional<KeyframeSet> keys;
      if (!keys_path.empty()) {
        keys = keyframes_from_json(read_json(keys_path));
      } else if (!input.empty()) {
        keys = run_strategy(load_sequence(input, parse_format(format, input)), cfg);
      } else if (frames >= 2) {
        switch (cfg.strategy) {
          case KeyStrategy::fixed: keys = select_fixed_gap(frames, cfg.gap); break;
          case KeyStrategy::random: keys = select_random_gap(frames, cfg.count, cfg.seed); break;
          case KeyStrategy::peaks:
            throw ValidationError("budget: the peaks strategy needs --input or --keys");
        }
      } else {
        throw ValidationError("budget: give --keys, --input, or --frames with a fixed/random strategy");
      }
      if (frames != 0 && frames != keys->source_length()) {
        throw ValidationError("budget: --frames disagrees with the key-frame set length");
      }
      model.block_size = cfg.search.block_size;
      emit(to_json(account_macs(*keys, width, height, cfg.generator_gmacs, model)), output, out);
    }
  } catch (const BackendError& e) {
    err << "error: backend failure: " << e.what() << "\n";
    if (e.frame_index()) err << "failing frame index: " << *e.frame_index() << "\n";
    return kExitBackend;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace maiv::cli
