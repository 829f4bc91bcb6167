#pragma once
#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "magloc/raster.hpp"

namespace magloc {

/// Field values at the four corners of a 2x2 cell, ordered (LL, LR, UL, UR)
/// = (B[i][j+1], B[i+1][j+1], B[i][j], B[i+1][j]): row j is the upper
/// (northern) row of the cell, row j+1 the lower.
struct CornerVector {
  double ll, lr, ul, ur;

  Eigen::Vector4d vec() const { return {ll, lr, ul, ur}; }
};

/// Gradient-space signature of one cell: first derivatives (nT/m) and the
/// mixed second derivative (nT/m^2).
struct CellFeature {
  double gx, gy, dxy;

  Eigen::Vector3d vec() const { return {gx, gy, dxy}; }
};

/// The 3x4 linear map from corner values to (gx, gy, dxy):
///   gx  = ( LR + UR - LL - UL) / (2 hx)
///   gy  = ( UL + UR - LL - LR) / (2 hy)
///   dxy = ( LL - LR - UL + UR) / (hx hy)
/// Every row sums to zero, so features ignore constant field offsets.
struct StencilMatrix {
  Eigen::Matrix<double, 3, 4> t;
  double hx, hy;

  CellFeature apply(const CornerVector& corners) const {
    const Eigen::Vector3d z = t * corners.vec();
    return {z[0], z[1], z[2]};
  }
};

/// Builds the stencil for planar spacing (hx, hy), both in meters, > 0.
StencilMatrix stencil(double hx, double hy);

/// Corner values of cell (i, j). Requires 0 <= i < width-1,
/// 0 <= j < height-1 ("out-of-bounds") and all four pixels valid
/// ("nodata-corner").
CornerVector cell_corners(const MagRaster& raster, int i, int j);

/// Per-cell features of a raster: (width-1) x (height-1) grid, planar
/// spacing, and a validity mask (a cell is invalid when any pixel of its
/// 2x2 stencil is nodata).
class FeatureGrid {
 public:
  FeatureGrid(int cells_x, int cells_y, double hx, double hy);

  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  bool valid(int i, int j) const { return valid_[idx(i, j)] != 0; }
  CellFeature at(int i, int j) const {
    const std::size_t k = idx(i, j);
    return {gx_[k], gy_[k], dxy_[k]};
  }

  const std::vector<double>& gx_plane() const { return gx_; }
  const std::vector<double>& gy_plane() const { return gy_; }
  const std::vector<double>& dxy_plane() const { return dxy_; }
  const std::vector<std::uint8_t>& valid_mask() const { return valid_; }

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * cells_x_ + i;
  }

  void set(int i, int j, const CellFeature& f, bool is_valid);

 private:
  int cells_x_, cells_y_;
  double hx_, hy_;
  std::vector<double> gx_, gy_, dxy_;
  std::vector<std::uint8_t> valid_;
};

/// Feature grid of a geographic raster; spacing comes from to_planar.
FeatureGrid feature_map(const MagRaster& raster);

/// Feature grid of a raw value grid with explicit planar spacing. `values`
/// is row-major width x height; `nodata_mask` may be empty (all valid).
FeatureGrid feature_map_planar(const std::vector<double>& values,
                               const std::vector<std::uint8_t>& nodata_mask,
                               int width, int height, double hx, double hy);

/// Per-cell gradient magnitude sqrt(gx^2 + gy^2), nT/m, as a raster on the
/// cell lattice (geo metadata shifted half a pixel from `source`). Invalid
/// cells are nodata.
MagRaster gradient_magnitude_map(const FeatureGrid& features, const MagRaster& source);

}  // namespace magloc
