#include "maiv/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "maiv/error.hpp"

namespace maiv {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config: bad value '" + value + "' for " + key);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

const char* name(KeyStrategy s) {
  switch (s) {
    case KeyStrategy::peaks: return "peaks";
    case KeyStrategy::fixed: return "fixed";
    case KeyStrategy::random: return "random";
  }
  return "?";
}

const char* name(InterpolationMethod m) {
  return m == InterpolationMethod::obmc ? "obmc" : "linear";
}

const char* name(BackendKind b) { return b == BackendKind::oracle ? "oracle" : "subprocess"; }

const char* name(UpsampleFilter f) {
  return f == UpsampleFilter::nearest ? "upsample-nearest" : "upsample-bilinear";
}

}  // namespace

void PipelineConfig::validate() const {
  if (window < 1 || window % 2 == 0) throw ValidationError("window must be a positive odd integer");
  if (d < 0 || d > 15) throw ValidationError("d must be in [0, 15]");
  if (p < 0) throw ValidationError("p must be >= 0");
  if (gap < 1) throw ValidationError("gap must be >= 1");
  if (count < 2) throw ValidationError("count must be >= 2");
  if (backend == BackendKind::subprocess && backend_command.empty()) {
    throw ValidationError("subprocess backend needs backend_command");
  }
  if (!(generator_gmacs >= 0)) throw ValidationError("generator_gmacs must be >= 0");
  search.validate();
  if (obmc.block_size != search.block_size) {
    throw ValidationError("OBMC and search block sizes must match");
  }
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "window") {
    window = parse_number<int>(key, value);
  } else if (key == "d") {
    d = parse_number<int>(key, value);
  } else if (key == "p") {
    p = parse_number<int>(key, value);
  } else if (key == "strategy") {
    if (value == "peaks") strategy = KeyStrategy::peaks;
    else if (value == "fixed") strategy = KeyStrategy::fixed;
    else if (value == "random") strategy = KeyStrategy::random;
    else throw ValidationError("config: unknown strategy '" + value + "'");
  } else if (key == "gap") {
    gap = parse_number<std::size_t>(key, value);
  } else if (key == "count") {
    count = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "method") {
    if (value == "obmc") method = InterpolationMethod::obmc;
    else if (value == "linear") method = InterpolationMethod::linear;
    else throw ValidationError("config: unknown method '" + value + "'");
  } else if (key == "backend") {
    if (value == "oracle") backend = BackendKind::oracle;
    else if (value == "subprocess") backend = BackendKind::subprocess;
    else throw ValidationError("config: unknown backend '" + value + "'");
  } else if (key == "backend_command") {
    backend_command = value;
  } else if (key == "oracle_mode") {
    if (value == "upsample-nearest") oracle_mode = UpsampleFilter::nearest;
    else if (value == "upsample-bilinear") oracle_mode = UpsampleFilter::bilinear;
    else throw ValidationError("config: unknown oracle_mode '" + value + "'");
  } else if (key == "search_range") {
    search.search_range = parse_number<int>(key, value);
  } else if (key == "early_exit_threshold") {
    search.early_exit_threshold = parse_number<double>(key, value);
  } else if (key == "block_size") {
    search.block_size = parse_number<int>(key, value);
    obmc.block_size = search.block_size;
  } else if (key == "generator_gmacs") {
    generator_gmacs = parse_number<double>(key, value);
  } else {
    throw ValidationError("config: unknown key '" + key + "'");
  }
}

std::string PipelineConfig::to_text() const {
  std::ostringstream out;
  out << "window = " << window << "\n"
      << "d = " << d << "\n"
      << "p = " << p << "\n"
      << "strategy = " << name(strategy) << "\n"
      << "gap = " << gap << "\n"
      << "count = " << count << "\n"
      << "seed = " << seed << "\n"
      << "method = " << name(method) << "\n"
      << "backend = " << name(backend) << "\n"
      << "backend_command = " << backend_command << "\n"
      << "oracle_mode = " << name(oracle_mode) << "\n"
      << "search_range = " << search.search_range << "\n"
      << "early_exit_threshold = " << format_double(search.early_exit_threshold) << "\n"
      << "block_size = " << search.block_size << "\n"
      << "generator_gmacs = " << format_double(generator_gmacs) << "\n";
  return out.str();
}

PipelineConfig PipelineConfig::from_text(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_text(text.str());
}

}  // namespace maiv
