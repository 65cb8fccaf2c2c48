#include "pdd/raster_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace pdd {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw IoError(path + ": " + what);
}

// Next integer token in a PGM header; '#' starts a comment through
// end-of-line, any whitespace separates tokens.
long pgm_token(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) fail(path, "malformed PGM header");
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1L << 30) fail(path, "PGM header value out of range");
    c = in.get();
  }
  if (c != EOF) in.unget();
  return value;
}

void put_u32le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) fail(path, "truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

constexpr std::uint32_t kMaxSide = 1u << 20; // 1M pixels per side is already absurd

} // namespace

Raster load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  char magic[2];
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5')
    fail(path, "not a binary PGM (P5) file");
  const long width = pgm_token(in, path);
  const long height = pgm_token(in, path);
  const long maxval = pgm_token(in, path);
  if (width < 1 || height < 1) fail(path, "bad PGM dimensions");
  if (maxval < 1 || maxval > 65535) fail(path, "bad PGM maxval");
  in.get(); // the single whitespace byte before the samples

  const bool wide = maxval > 255;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<unsigned char> bytes(count * (wide ? 2 : 1));
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    fail(path, "truncated PGM samples");

  ImageArray values(height, width);
  double* out = values.data();
  if (wide) {
    for (std::size_t i = 0; i < count; ++i) // 16-bit samples are big-endian
      out[i] = static_cast<double>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
  } else {
    for (std::size_t i = 0; i < count; ++i) out[i] = bytes[i];
  }
  return Raster(std::move(values), Domain::Intensity);
}

void save_pgm(const Raster& raster, const std::string& path, int maxval) {
  if (raster.domain() != Domain::Intensity)
    throw ValidationError(path + ": PGM can only store intensity rasters");
  if (maxval != 255 && maxval != 65535)
    throw ValidationError(path + ": PGM maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << raster.width() << " " << raster.height() << "\n" << maxval << "\n";

  const double* src = raster.array().data();
  const std::size_t count = static_cast<std::size_t>(raster.size());
  std::vector<unsigned char> bytes;
  if (maxval > 255) {
    bytes.resize(count * 2);
    for (std::size_t i = 0; i < count; ++i) {
      double v = std::round(src[i]);
      long s = static_cast<long>(std::min(std::max(v, 0.0), 65535.0));
      bytes[2 * i] = static_cast<unsigned char>((s >> 8) & 0xff);
      bytes[2 * i + 1] = static_cast<unsigned char>(s & 0xff);
    }
  } else {
    bytes.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      double v = std::round(src[i]);
      bytes[i] = static_cast<unsigned char>(std::min(std::max(v, 0.0), 255.0));
    }
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (!out) fail(path, "write failed");
}

Raster load_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "PDDF", 4) != 0)
    fail(path, "not a raw raster (PDDF) file");
  const std::uint32_t width = get_u32le(in, path);
  const std::uint32_t height = get_u32le(in, path);
  const std::uint32_t tag = get_u32le(in, path);
  if (width < 1 || height < 1 || width > kMaxSide || height > kMaxSide)
    fail(path, "bad raster dimensions");
  if (tag > 1) fail(path, "unknown domain tag");

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<float> samples(count);
  if (!in.read(reinterpret_cast<char*>(samples.data()), count * sizeof(float)))
    fail(path, "truncated samples");

  ImageArray values(height, width);
  double* out = values.data();
  for (std::size_t i = 0; i < count; ++i) out[i] = samples[i];
  try {
    return Raster(std::move(values), tag == 0 ? Domain::Intensity : Domain::Log);
  } catch (const ValidationError& e) {
    fail(path, std::string("corrupt samples: ") + e.what());
  }
}

void save_raw(const Raster& raster, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  out.write("PDDF", 4);
  put_u32le(out, static_cast<std::uint32_t>(raster.width()));
  put_u32le(out, static_cast<std::uint32_t>(raster.height()));
  put_u32le(out, raster.domain() == Domain::Intensity ? 0u : 1u);

  const double* src = raster.array().data();
  const std::size_t count = static_cast<std::size_t>(raster.size());
  std::vector<float> samples(count);
  for (std::size_t i = 0; i < count; ++i) samples[i] = static_cast<float>(src[i]);
  out.write(reinterpret_cast<const char*>(samples.data()), count * sizeof(float));
  if (!out) fail(path, "write failed");
}

Raster load_raster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  if (magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
  if (std::memcmp(magic, "PDDF", 4) == 0) return load_raw(path);
  fail(path, "unrecognized raster format");
}

void save_raster(const Raster& raster, const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0)
    save_pgm(raster, path);
  else
    save_raw(raster, path);
}

} // namespace pdd
