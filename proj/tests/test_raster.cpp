#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "magloc/errors.hpp"
#include "magloc/raster.hpp"
#include "magloc/rng.hpp"

using namespace magloc;

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

MagRaster random_raster(int w, int h, RngStream& rng) {
  MagRaster r(w, h, rng.uniform(-120.0, -70.0), rng.uniform(25.0, 45.0),
              30.0 / 3600.0, 30.0 / 3600.0);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) r.set_value(i, j, rng.uniform(-400.0, 400.0));
  return r;
}

}  // namespace

TEST_CASE("parses a trivial 3x3 ASCII grid") {
  const std::string path = temp_file("magloc_zeros.asc");
  write_text(path,
             "ncols 3\nnrows 3\nxllcorner -100\nyllcorner 35\ncellsize 0.5\n"
             "NODATA_value -9999\n0 0 0\n0 0 0\n0 0 0\n");
  const MagRaster r = load_raster(path, RasterFormat::Asc);
  CHECK(r.width() == 3);
  CHECK(r.height() == 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      CHECK(r.value(i, j) == 0.0);
      CHECK(!r.is_nodata(i, j));
    }
}

TEST_CASE("nodata sentinel cells are masked") {
  const std::string path = temp_file("magloc_nodata.asc");
  write_text(path,
             "ncols 2\nnrows 2\nxllcorner -100\nyllcorner 35\ncellsize 0.5\n"
             "NODATA_value -9999\n1 -9999\n3 4\n");
  const MagRaster r = load_raster(path, RasterFormat::Asc);
  CHECK(r.is_nodata(1, 0));
  CHECK(!r.is_nodata(0, 0));
  CHECK(r.value(0, 1) == 3.0);
}

TEST_CASE("row 0 of the file is the northern row") {
  const std::string path = temp_file("magloc_rows.asc");
  write_text(path,
             "ncols 2\nnrows 2\nxllcorner -100\nyllcorner 35\ncellsize 1\n"
             "NODATA_value -9999\n10 11\n20 21\n");
  const MagRaster r = load_raster(path, RasterFormat::Asc);
  CHECK(r.value(0, 0) == 10.0);
  CHECK(r.value(0, 1) == 20.0);
  CHECK(r.pixel_lat(0) > r.pixel_lat(1));
  CHECK(r.pixel_lat(1) == doctest::Approx(35.5));
  CHECK(r.pixel_lat(0) == doctest::Approx(36.5));
}

TEST_CASE("parse errors carry diagnostics") {
  SUBCASE("missing header key") {
    const std::string path = temp_file("magloc_badhdr.asc");
    write_text(path, "ncols 2\nnrows 2\nxllcorner -100\ncellsize 0.5\n");
    CHECK_THROWS_AS(load_raster(path, RasterFormat::Asc), ParseError);
  }
  SUBCASE("too few values") {
    const std::string path = temp_file("magloc_short.asc");
    write_text(path,
               "ncols 2\nnrows 2\nxllcorner -100\nyllcorner 35\ncellsize 0.5\n"
               "NODATA_value -9999\n1 2 3\n");
    CHECK_THROWS_AS(load_raster(path, RasterFormat::Asc), ParseError);
  }
  SUBCASE("too many values") {
    const std::string path = temp_file("magloc_long.asc");
    write_text(path,
               "ncols 2\nnrows 2\nxllcorner -100\nyllcorner 35\ncellsize 0.5\n"
               "NODATA_value -9999\n1 2\n3 4\n5\n");
    CHECK_THROWS_AS(load_raster(path, RasterFormat::Asc), ParseError);
  }
  SUBCASE("non-numeric token") {
    const std::string path = temp_file("magloc_token.asc");
    write_text(path,
               "ncols 2\nnrows 2\nxllcorner -100\nyllcorner 35\ncellsize 0.5\n"
               "NODATA_value -9999\n1 2\n3 oops\n");
    CHECK_THROWS_AS(load_raster(path, RasterFormat::Asc), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_raster("/nonexistent/magloc.asc", RasterFormat::Asc), IoError);
  }
  SUBCASE("bad magic in binary") {
    const std::string path = temp_file("magloc_badmagic.bin");
    write_text(path, "NOPE!rest");
    CHECK_THROWS_AS(load_raster(path, RasterFormat::Bin), ParseError);
  }
}

TEST_CASE("ASCII round trip is bit-identical") {
  RngStream rng(31);
  MagRaster original = random_raster(7, 5, rng);
  original.set_value(2, 3, original.nodata_value());
  original.set_nodata(2, 3);
  const std::string path = temp_file("magloc_rt.asc");
  save_raster(original, path, RasterFormat::Asc);
  const MagRaster loaded = load_raster(path, RasterFormat::Asc);
  REQUIRE(loaded.width() == original.width());
  REQUIRE(loaded.height() == original.height());
  CHECK(loaded.origin_lon() == original.origin_lon());
  CHECK(loaded.origin_lat() == original.origin_lat());
  CHECK(loaded.cell_dlon() == original.cell_dlon());
  for (int j = 0; j < original.height(); ++j)
    for (int i = 0; i < original.width(); ++i) {
      CHECK(loaded.value(i, j) == original.value(i, j));
      CHECK(loaded.is_nodata(i, j) == original.is_nodata(i, j));
    }
}

TEST_CASE("binary round trip is bit-identical") {
  RngStream rng(32);
  MagRaster original = random_raster(9, 11, rng);
  original.set_value(0, 0, original.nodata_value());
  original.set_nodata(0, 0);
  const std::string path = temp_file("magloc_rt.bin");
  save_raster(original, path, RasterFormat::Bin);
  const MagRaster loaded = load_raster(path, RasterFormat::Bin);
  REQUIRE(loaded.width() == original.width());
  REQUIRE(loaded.height() == original.height());
  CHECK(loaded.cell_dlat() == original.cell_dlat());
  for (int j = 0; j < original.height(); ++j)
    for (int i = 0; i < original.width(); ++i) {
      CHECK(loaded.value(i, j) == original.value(i, j));
      CHECK(loaded.is_nodata(i, j) == original.is_nodata(i, j));
    }
}

TEST_CASE("planar spacing at the equator") {
  // 30 arc-seconds of arc on a 6,371,000 m sphere.
  const double cell = 30.0 / 3600.0;
  MagRaster r(4, 4, 10.0, -2.0 * cell, cell, cell);
  CHECK(r.center_lat() == doctest::Approx(0.0).epsilon(1e-12));
  const auto [hx, hy] = to_planar(r);
  const double expected = kEarthRadius * cell * M_PI / 180.0;
  CHECK(hy == doctest::Approx(expected).epsilon(1e-12));
  CHECK(hx == doctest::Approx(expected).epsilon(1e-9));
  CHECK(expected == doctest::Approx(926.62).epsilon(1e-4));
}

TEST_CASE("planar spacing shrinks east-west with latitude") {
  // Center the grid at 60 N: cos(60 deg) = 1/2, so hx is half of hy.
  const double cell = 30.0 / 3600.0;
  MagRaster r(4, 4, 10.0, 60.0 - 2.0 * cell, cell, cell);
  const auto [hx, hy] = to_planar(r);
  CHECK(hx == doctest::Approx(hy / 2.0).epsilon(1e-9));
  CHECK(hx > 0.0);
  CHECK(hy > 0.0);
}

TEST_CASE("polar projection is rejected") {
  MagRaster r(4, 4, 10.0, 89.0, 0.01, 0.01);
  CHECK_THROWS_AS(to_planar(r), ContractError);
}

TEST_CASE("pixel and cell centers are consistent") {
  MagRaster r(5, 4, -100.0, 35.0, 0.5, 0.5);
  CHECK(r.pixel_lon(0) == doctest::Approx(-99.75));
  CHECK(r.pixel_lat(3) == doctest::Approx(35.25));   // southernmost row
  CHECK(r.pixel_lat(0) == doctest::Approx(36.75));   // northernmost row
  // Cell (1, 1) spans pixels {1,2} x {1,2}.
  CHECK(r.cell_center_lon(1) == doctest::Approx(-99.0));
  CHECK(r.cell_center_lat(1) == doctest::Approx(36.0));
}

TEST_CASE("out-of-bounds pixel access throws") {
  MagRaster r(3, 3, 0.0, 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(r.value(3, 0), ContractError);
  CHECK_THROWS_AS(r.value(0, -1), ContractError);
}
