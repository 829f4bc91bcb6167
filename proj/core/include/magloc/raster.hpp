#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace magloc {

enum class RasterFormat { Asc, Bin };

/// 2D scalar magnetic-field grid (nT) with geographic metadata and a
/// nodata mask.
///
/// Index convention: `i` is the column (east positive), `j` the row
/// counted from the northern edge, matching the row order of ESRI ASCII
/// files (row 0 of the file is the northernmost). (origin_lon, origin_lat)
/// is the lower-left corner of the grid, as in the ESRI header. A 2x2
/// matching cell (i, j) is spanned by pixels {i, i+1} x {j, j+1}; its
/// lower (southern) row is j+1.
class MagRaster {
 public:
  MagRaster(int width, int height, double origin_lon, double origin_lat,
            double cell_dlon, double cell_dlat, double nodata_value = -99999.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double origin_lon() const { return origin_lon_; }
  double origin_lat() const { return origin_lat_; }
  double cell_dlon() const { return cell_dlon_; }
  double cell_dlat() const { return cell_dlat_; }
  double nodata_value() const { return nodata_value_; }

  double value(int i, int j) const { return values_[idx(i, j)]; }
  void set_value(int i, int j, double v) { values_[idx(i, j)] = v; }
  bool is_nodata(int i, int j) const { return nodata_[idx(i, j)] != 0; }
  void set_nodata(int i, int j) { nodata_[idx(i, j)] = 1; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint8_t>& nodata_mask() const { return nodata_; }

  /// Geographic center of pixel (i, j).
  double pixel_lat(int j) const {
    return origin_lat_ + (height_ - j - 0.5) * cell_dlat_;
  }
  double pixel_lon(int i) const { return origin_lon_ + (i + 0.5) * cell_dlon_; }

  /// Geographic center of the 2x2 cell (i, j), i in [0, width-2],
  /// j in [0, height-2]: the midpoint of its four pixel centers.
  double cell_center_lat(int j) const {
    return origin_lat_ + (height_ - j - 1.0) * cell_dlat_;
  }
  double cell_center_lon(int i) const { return origin_lon_ + (i + 1.0) * cell_dlon_; }

  /// Latitude of the grid midpoint, used for the planar projection.
  double center_lat() const {
    return origin_lat_ + 0.5 * height_ * cell_dlat_;
  }

 private:
  std::size_t idx(int i, int j) const;
  int width_, height_;
  double origin_lon_, origin_lat_;
  double cell_dlon_, cell_dlat_;
  double nodata_value_;
  std::vector<double> values_;
  std::vector<std::uint8_t> nodata_;
};

/// Local equirectangular planar spacing (hx, hy) in meters of one pixel
/// step, evaluated at the raster's center latitude:
/// hy = R * dlat_rad, hx = R * cos(lat_center) * dlon_rad with
/// R = 6,371,000 m. Throws ContractError("polar-degenerate") when
/// |center latitude| >= 89 degrees.
std::pair<double, double> to_planar(const MagRaster& raster);

/// Mean Earth radius used by to_planar, meters.
inline constexpr double kEarthRadius = 6.371e6;

/// Reads a raster. Asc: standard 6-line ESRI ASCII header (ncols, nrows,
/// xllcorner, yllcorner, cellsize, NODATA_value) followed by
/// whitespace-separated values, northernmost row first. Bin: the MAGR1
/// little-endian layout produced by save_raster. Throws ParseError with a
/// line number (Asc) or offset description (Bin) on malformed input,
/// IoError when the file cannot be read.
MagRaster load_raster(const std::string& path, RasterFormat format);

/// Writes a raster in either format. Asc values are printed with 17
/// significant digits so a save/load round trip is bit-identical.
void save_raster(const MagRaster& raster, const std::string& path,
                 RasterFormat format);

}  // namespace magloc
