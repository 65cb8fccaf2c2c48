#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "pdd/raster.hpp"
#include "pdd/raster_io.hpp"

using namespace pdd;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/pdd_raster_test_") + name;
}

ImageArray ramp(Index h, Index w, double scale) {
  ImageArray a(h, w);
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c < w; ++c) a(r, c) = scale * (r * w + c);
  return a;
}

} // namespace

TEST_CASE("raster validates on construction") {
  CHECK_NOTHROW(Raster(ImageArray::Constant(2, 3, 1.5), Domain::Intensity));
  CHECK_THROWS_AS(Raster(ImageArray(0, 0), Domain::Intensity), ValidationError);

  ImageArray bad = ImageArray::Constant(2, 2, 1.0);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Raster(bad, Domain::Intensity), ValidationError);

  ImageArray negative = ImageArray::Constant(2, 2, -1.0);
  CHECK_THROWS_AS(Raster(negative, Domain::Intensity), ValidationError);
  CHECK_NOTHROW(Raster(negative, Domain::Log)); // log domain may be negative
}

TEST_CASE("looks validates count") {
  CHECK_THROWS_AS(Looks(0), ValidationError);
  CHECK_THROWS_AS(Looks(-3), ValidationError);
  CHECK(Looks(4).count == 4);
}

TEST_CASE("pgm 8-bit round trip") {
  const std::string path = temp_path("8bit.pgm");
  ImageArray a(3, 4);
  for (Index r = 0; r < 3; ++r)
    for (Index c = 0; c < 4; ++c) a(r, c) = r * 4 + c + 10;
  save_pgm(Raster(a, Domain::Intensity), path, 255);
  const Raster back = load_pgm(path);
  CHECK(back.height() == 3);
  CHECK(back.width() == 4);
  CHECK(back.domain() == Domain::Intensity);
  CHECK((back.array() - a).abs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("pgm 16-bit round trip keeps big-endian samples") {
  const std::string path = temp_path("16bit.pgm");
  ImageArray a(2, 2);
  a << 0, 255, 256, 65535;
  save_pgm(Raster(a, Domain::Intensity), path, 65535);
  const Raster back = load_pgm(path);
  CHECK((back.array() - a).abs().maxCoeff() == 0.0);

  // independent check of the byte order: 256 = 0x0100 must serialize hi,lo
  std::ifstream in(path, std::ios::binary);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t data = all.size() - 8; // 4 samples * 2 bytes
  CHECK(static_cast<unsigned char>(all[data + 4]) == 0x01);
  CHECK(static_cast<unsigned char>(all[data + 5]) == 0x00);
  std::remove(path.c_str());
}

TEST_CASE("pgm save clamps and rounds") {
  const std::string path = temp_path("clamp.pgm");
  ImageArray a(1, 3);
  a << -4.2, 17.6, 300.0;
  save_pgm(Raster(a.max(0.0), Domain::Intensity), path, 255); // keep ctor happy
  Raster back = load_pgm(path);
  CHECK(back(0, 0) == 0.0);
  CHECK(back(0, 1) == 18.0);
  CHECK(back(0, 2) == 255.0);
  std::remove(path.c_str());
}

TEST_CASE("pgm maxval restricted to supported depths") {
  const Raster r(ImageArray::Constant(2, 2, 1.0), Domain::Intensity);
  CHECK_THROWS_AS(save_pgm(r, temp_path("bad.pgm"), 1023), ValidationError);
}

TEST_CASE("pgm refuses log rasters") {
  const Raster r(ImageArray::Constant(2, 2, -0.5), Domain::Log);
  CHECK_THROWS_AS(save_pgm(r, temp_path("log.pgm"), 255), ValidationError);
}

TEST_CASE("pgm header comments and whitespace are tolerated") {
  const std::string path = temp_path("comment.pgm");
  std::ofstream out(path, std::ios::binary);
  out << "P5\n# a comment line\n 3 # trailing\n2\n255\n";
  const unsigned char bytes[6] = {1, 2, 3, 4, 5, 6};
  out.write(reinterpret_cast<const char*>(bytes), 6);
  out.close();
  const Raster r = load_pgm(path);
  CHECK(r.width() == 3);
  CHECK(r.height() == 2);
  CHECK(r(1, 2) == 6.0);
  std::remove(path.c_str());
}

TEST_CASE("raw format round trips both domains with float32 precision") {
  for (Domain domain : {Domain::Intensity, Domain::Log}) {
    const std::string path = temp_path("raw.bin");
    ImageArray a = ramp(5, 7, domain == Domain::Log ? -0.125 : 0.125);
    save_raw(Raster(a, domain), path);
    const Raster back = load_raw(path);
    CHECK(back.domain() == domain);
    CHECK(back.height() == 5);
    CHECK(back.width() == 7);
    // eighths are exact in float32
    CHECK((back.array() - a).abs().maxCoeff() == 0.0);
    std::remove(path.c_str());
  }
}

TEST_CASE("load_raster sniffs the container") {
  const std::string pgm = temp_path("sniff.pgm");
  const std::string raw = temp_path("sniff.bin");
  const Raster r(ImageArray::Constant(2, 2, 9.0), Domain::Intensity);
  save_pgm(r, pgm, 255);
  save_raw(r, raw);
  CHECK(load_raster(pgm).width() == 2);
  CHECK(load_raster(raw).width() == 2);
  std::remove(pgm.c_str());
  std::remove(raw.c_str());
}

TEST_CASE("save_raster picks the container from the extension") {
  const std::string pgm = temp_path("ext.pgm");
  const std::string raw = temp_path("ext.dat");
  const Raster r(ImageArray::Constant(2, 2, 3.0), Domain::Intensity);
  save_raster(r, pgm);
  save_raster(r, raw);
  std::ifstream a(pgm, std::ios::binary), b(raw, std::ios::binary);
  char ma[2], mb[4];
  a.read(ma, 2);
  b.read(mb, 4);
  CHECK(std::string(ma, 2) == "P5");
  CHECK(std::string(mb, 4) == "PDDF");
  std::remove(pgm.c_str());
  std::remove(raw.c_str());
}

TEST_CASE("io failures map to IoError") {
  CHECK_THROWS_AS(load_raster("/nonexistent/path/image.pgm"), IoError);
  CHECK_THROWS_AS(load_pgm("/nonexistent/path/image.pgm"), IoError);

  const std::string garbage = temp_path("garbage.bin");
  std::ofstream out(garbage, std::ios::binary);
  out << "not an image at all";
  out.close();
  CHECK_THROWS_AS(load_raster(garbage), IoError);

  // truncated raw payload
  const std::string truncated = temp_path("short.bin");
  const Raster r(ImageArray::Constant(4, 4, 2.0), Domain::Intensity);
  save_raw(r, truncated);
  std::ifstream in(truncated, std::ios::binary);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::ofstream cut(truncated, std::ios::binary | std::ios::trunc);
  cut.write(all.data(), static_cast<std::streamsize>(all.size() - 7));
  cut.close();
  CHECK_THROWS_AS(load_raw(truncated), IoError);
  std::remove(garbage.c_str());
  std::remove(truncated.c_str());
}
