// Reference generator process for the MAIG/MAIR protocol.
//
// Reads requests on stdin and answers each with the newest semantic map
// nearest-upsampled to full resolution. Written against the wire format
// only, so it doubles as a template for real generator wrappers.
//
//   --exit-after N   answer N requests, then send half a response and exit 3
//   --kill-after N   as --exit-after, but the process ends by SIGKILL
//   --wrong-dims     answer with one extra column

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

namespace {

bool read_exact(void* data, std::size_t size) {
  return std::fread(data, 1, size, stdin) == size;
}

void write_all(const void* data, std::size_t size) {
  if (std::fwrite(data, 1, size, stdout) != size) std::exit(5);
}

std::uint32_t u32(const unsigned char* p) {
  return p[0] | p[1] << 8 | p[2] << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

}  // namespace

int main(int argc, char** argv) {
  long exit_after = -1;
  bool kill_self = false;
  bool wrong_dims = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--exit-after") == 0 && i + 1 < argc) {
      exit_after = std::strtol(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--kill-after") == 0 && i + 1 < argc) {
      exit_after = std::strtol(argv[++i], nullptr, 10);
      kill_self = true;
    } else if (std::strcmp(argv[i], "--wrong-dims") == 0) {
      wrong_dims = true;
    } else {
      std::fprintf(stderr, "echo_backend: unknown argument %s\n", argv[i]);
      return 2;
    }
  }

  for (long served = 0;; ++served) {
    unsigned char header[24];
    const std::size_t got = std::fread(header, 1, sizeof(header), stdin);
    if (got == 0 && std::feof(stdin)) return 0;
    if (got != sizeof(header) || std::memcmp(header, "MAIG", 4) != 0) {
      std::fprintf(stderr, "echo_backend: bad request header\n");
      return 1;
    }
    const std::uint32_t p = u32(header + 4), d = u32(header + 8);
    const std::uint32_t height = u32(header + 12), width = u32(header + 16);
    const std::uint32_t channels = u32(header + 20);
    const std::uint32_t scale = 1u << d;
    const std::size_t low = static_cast<std::size_t>(width / scale) * (height / scale) * channels;
    const std::size_t full = static_cast<std::size_t>(width) * height * channels;

    std::vector<unsigned char> maps(low * (p + 1));
    std::vector<unsigned char> previous(full * p);
    if (!read_exact(maps.data(), maps.size()) || !read_exact(previous.data(), previous.size())) {
      std::fprintf(stderr, "echo_backend: truncated request\n");
      return 1;
    }

    const std::uint32_t out_w = wrong_dims ? width + 1 : width;
    std::vector<unsigned char> response{'M', 'A', 'I', 'R'};
    put_u32(response, height);
    put_u32(response, out_w);
    put_u32(response, channels);
    const unsigned char* newest = maps.data() + low * p;
    const std::uint32_t low_w = width / scale, low_h = height / scale;
    for (std::uint32_t c = 0; c < channels; ++c) {
      for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < out_w; ++x) {
          const std::uint32_t sx = x < width ? x / scale : low_w - 1;
          response.push_back(newest[(static_cast<std::size_t>(c) * low_h + y / scale) * low_w + sx]);
        }
      }
    }

    if (exit_after >= 0 && served == exit_after) {
      write_all(response.data(), response.size() / 2);
      std::fflush(stdout);
      if (kill_self) std::raise(SIGKILL);
      return 3;
    }
    write_all(response.data(), response.size());
    std::fflush(stdout);
  }
}
