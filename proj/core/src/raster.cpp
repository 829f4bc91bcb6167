#include "magloc/raster.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "magloc/errors.hpp"

namespace magloc {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr char kBinMagic[5] = {'M', 'A', 'G', 'R', '1'};

static_assert(std::endian::native == std::endian::little,
              "MAGR1 I/O assumes a little-endian host");

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_header_line(std::istream& in, const char* expected_key, long line_no) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(std::string("missing header line '") + expected_key + "'", line_no);
  std::istringstream ls(line);
  std::string key;
  double value;
  if (!(ls >> key >> value) || lower(key) != expected_key)
    throw ParseError(std::string("expected header line '") + expected_key + " <value>'",
                     line_no);
  return value;
}
}  // namespace

std::size_t MagRaster::idx(int i, int j) const {
  if (i < 0 || i >= width_ || j < 0 || j >= height_)
    throw ContractError("out-of-bounds", "pixel (" + std::to_string(i) + ", " +
                                             std::to_string(j) + ") outside raster");
  return static_cast<std::size_t>(j) * width_ + i;
}

MagRaster::MagRaster(int width, int height, double origin_lon, double origin_lat,
                     double cell_dlon, double cell_dlat, double nodata_value)
    : width_(width),
      height_(height),
      origin_lon_(origin_lon),
      origin_lat_(origin_lat),
      cell_dlon_(cell_dlon),
      cell_dlat_(cell_dlat),
      nodata_value_(nodata_value),
      values_(static_cast<std::size_t>(width) * height, 0.0),
      nodata_(static_cast<std::size_t>(width) * height, 0) {
  if (width < 1 || height < 1)
    throw ContractError("dimension-mismatch", "raster dimensions must be >= 1");
  if (!(cell_dlon > 0.0) || !(cell_dlat > 0.0))
    throw ContractError("dimension-mismatch", "cell sizes must be positive");
}

std::pair<double, double> to_planar(const MagRaster& raster) {
  const double lat = raster.center_lat();
  if (std::abs(lat) >= 89.0)
    throw ContractError("polar-degenerate",
                        "planar projection is degenerate near the poles");
  const double hy = kEarthRadius * raster.cell_dlat() * kDegToRad;
  const double hx = kEarthRadius * std::cos(lat * kDegToRad) * raster.cell_dlon() * kDegToRad;
  return {hx, hy};
}

namespace {

MagRaster load_asc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  const double ncols = parse_header_line(in, "ncols", 1);
  const double nrows = parse_header_line(in, "nrows", 2);
  const double xll = parse_header_line(in, "xllcorner", 3);
  const double yll = parse_header_line(in, "yllcorner", 4);
  const double cellsize = parse_header_line(in, "cellsize", 5);
  const double nodata = parse_header_line(in, "nodata_value", 6);

  if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows))
    throw ParseError("ncols/nrows must be positive integers", 1);
  const int width = static_cast<int>(ncols);
  const int height = static_cast<int>(nrows);

  MagRaster raster(width, height, xll, yll, cellsize, cellsize, nodata);
  long line_no = 7;
  std::string line;
  std::size_t count = 0;
  const std::size_t expected = static_cast<std::size_t>(width) * height;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double v;
    while (ls >> v) {
      if (count >= expected)
        throw ParseError("more values than ncols * nrows", line_no);
      const int j = static_cast<int>(count / width);
      const int i = static_cast<int>(count % width);
      raster.set_value(i, j, v);
      if (v == nodata) raster.set_nodata(i, j);
      ++count;
    }
    if (!ls.eof()) throw ParseError("non-numeric token in value rows", line_no);
    ++line_no;
  }
  if (count != expected)
    throw ParseError("expected " + std::to_string(expected) + " values, found " +
                         std::to_string(count),
                     line_no);
  return raster;
}

MagRaster load_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  char magic[5];
  if (!in.read(magic, 5) || std::memcmp(magic, kBinMagic, 5) != 0)
    throw ParseError("bad magic bytes (expected MAGR1) at offset 0");

  std::uint32_t width = 0, height = 0;
  double geo[4], nodata = 0.0;
  if (!in.read(reinterpret_cast<char*>(&width), 4) ||
      !in.read(reinterpret_cast<char*>(&height), 4) ||
      !in.read(reinterpret_cast<char*>(geo), 32) ||
      !in.read(reinterpret_cast<char*>(&nodata), 8))
    throw ParseError("truncated MAGR1 header (offset < 49)");
  if (width < 1 || height < 1 || width > (1u << 24) || height > (1u << 24))
    throw ParseError("implausible MAGR1 dimensions");

  MagRaster raster(static_cast<int>(width), static_cast<int>(height), geo[0], geo[1],
                   geo[2], geo[3], nodata);
  std::vector<double> row(width);
  for (std::uint32_t j = 0; j < height; ++j) {
    if (!in.read(reinterpret_cast<char*>(row.data()), 8 * width))
      throw ParseError("truncated MAGR1 payload at row " + std::to_string(j));
    for (std::uint32_t i = 0; i < width; ++i) {
      raster.set_value(static_cast<int>(i), static_cast<int>(j), row[i]);
      if (row[i] == nodata) raster.set_nodata(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return raster;
}

void save_asc(const MagRaster& raster, const std::string& path) {
  if (raster.cell_dlon() != raster.cell_dlat())
    throw ContractError("dimension-mismatch",
                        "ESRI ASCII has one cellsize; use the binary format for "
                        "non-square cells");
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  std::fprintf(out, "ncols %d\n", raster.width());
  std::fprintf(out, "nrows %d\n", raster.height());
  std::fprintf(out, "xllcorner %.17g\n", raster.origin_lon());
  std::fprintf(out, "yllcorner %.17g\n", raster.origin_lat());
  std::fprintf(out, "cellsize %.17g\n", raster.cell_dlon());
  std::fprintf(out, "NODATA_value %.17g\n", raster.nodata_value());
  for (int j = 0; j < raster.height(); ++j) {
    for (int i = 0; i < raster.width(); ++i) {
      const double v =
          raster.is_nodata(i, j) ? raster.nodata_value() : raster.value(i, j);
      std::fprintf(out, i + 1 == raster.width() ? "%.17g\n" : "%.17g ", v);
    }
  }
  if (std::fclose(out) != 0) throw IoError("write failure on '" + path + "'");
}

void save_bin(const MagRaster& raster, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kBinMagic, 5);
  const std::uint32_t width = static_cast<std::uint32_t>(raster.width());
  const std::uint32_t height = static_cast<std::uint32_t>(raster.height());
  const double geo[4] = {raster.origin_lon(), raster.origin_lat(),
                         raster.cell_dlon(), raster.cell_dlat()};
  const double nodata = raster.nodata_value();
  out.write(reinterpret_cast<const char*>(&width), 4);
  out.write(reinterpret_cast<const char*>(&height), 4);
  out.write(reinterpret_cast<const char*>(geo), 32);
  out.write(reinterpret_cast<const char*>(&nodata), 8);
  std::vector<double> row(width);
  for (int j = 0; j < raster.height(); ++j) {
    for (int i = 0; i < raster.width(); ++i)
      row[i] = raster.is_nodata(i, j) ? nodata : raster.value(i, j);
    out.write(reinterpret_cast<const char*>(row.data()), 8 * width);
  }
  if (!out) throw IoError("write failure on '" + path + "'");
}

}  // namespace

MagRaster load_raster(const std::string& path, RasterFormat format) {
  return format == RasterFormat::Asc ? load_asc(path) : load_bin(path);
}

void save_raster(const MagRaster& raster, const std::string& path,
                 RasterFormat format) {
  if (format == RasterFormat::Asc)
    save_asc(raster, path);
  else
    save_bin(raster, path);
}

}  // namespace magloc
