#include "magloc/features.hpp"

#include <cmath>

#include "magloc/errors.hpp"

namespace magloc {

StencilMatrix stencil(double hx, double hy) {
  if (!(hx > 0.0) || !(hy > 0.0))
    throw ContractError("dimension-mismatch", "planar spacing must be positive");
  StencilMatrix s;
  s.hx = hx;
  s.hy = hy;
  const double ax = 1.0 / (2.0 * hx);
  const double ay = 1.0 / (2.0 * hy);
  const double axy = 1.0 / (hx * hy);
  s.t << -ax, ax, -ax, ax,
         -ay, -ay, ay, ay,
         axy, -axy, -axy, axy;
  return s;
}

CornerVector cell_corners(const MagRaster& raster, int i, int j) {
  if (i < 0 || i >= raster.width() - 1 || j < 0 || j >= raster.height() - 1)
    throw ContractError("out-of-bounds", "cell (" + std::to_string(i) + ", " +
                                             std::to_string(j) +
                                             ") has no complete 2x2 stencil");
  if (raster.is_nodata(i, j) || raster.is_nodata(i + 1, j) ||
      raster.is_nodata(i, j + 1) || raster.is_nodata(i + 1, j + 1))
    throw ContractError("nodata-corner", "cell touches a nodata pixel");
  return {raster.value(i, j + 1), raster.value(i + 1, j + 1), raster.value(i, j),
          raster.value(i + 1, j)};
}

FeatureGrid::FeatureGrid(int cells_x, int cells_y, double hx, double hy)
    : cells_x_(cells_x),
      cells_y_(cells_y),
      hx_(hx),
      hy_(hy),
      gx_(static_cast<std::size_t>(cells_x) * cells_y, 0.0),
      gy_(static_cast<std::size_t>(cells_x) * cells_y, 0.0),
      dxy_(static_cast<std::size_t>(cells_x) * cells_y, 0.0),
      valid_(static_cast<std::size_t>(cells_x) * cells_y, 0) {
  if (cells_x < 1 || cells_y < 1)
    throw ContractError("dimension-mismatch", "feature grid needs >= 2x2 pixels");
}

void FeatureGrid::set(int i, int j, const CellFeature& f, bool is_valid) {
  const std::size_t k = idx(i, j);
  gx_[k] = f.gx;
  gy_[k] = f.gy;
  dxy_[k] = f.dxy;
  valid_[k] = is_valid ? 1 : 0;
}

FeatureGrid feature_map_planar(const std::vector<double>& values,
                               const std::vector<std::uint8_t>& nodata_mask,
                               int width, int height, double hx, double hy) {
  if (width < 2 || height < 2)
    throw ContractError("dimension-mismatch", "feature grid needs >= 2x2 pixels");
  if (values.size() != static_cast<std::size_t>(width) * height)
    throw ContractError("dimension-mismatch", "value buffer size mismatch");
  const bool masked = !nodata_mask.empty();
  if (masked && nodata_mask.size() != values.size())
    throw ContractError("dimension-mismatch", "mask size mismatch");

  FeatureGrid grid(width - 1, height - 1, hx, hy);
  const double ax = 1.0 / (2.0 * hx);
  const double ay = 1.0 / (2.0 * hy);
  const double axy = 1.0 / (hx * hy);
  for (int j = 0; j + 1 < height; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * width;
    for (int i = 0; i + 1 < width; ++i) {
      const std::size_t k_ul = row + i;
      if (masked && (nodata_mask[k_ul] || nodata_mask[k_ul + 1] ||
                     nodata_mask[k_ul + width] || nodata_mask[k_ul + width + 1])) {
        grid.set(i, j, {0.0, 0.0, 0.0}, false);
        continue;
      }
      const double ul = values[k_ul];
      const double ur = values[k_ul + 1];
      const double ll = values[k_ul + width];
      const double lr = values[k_ul + width + 1];
      // Differences first: constant offsets cancel before any rounding.
      const CellFeature f{((lr - ll) + (ur - ul)) * ax,
                          ((ul - ll) + (ur - lr)) * ay,
                          ((ll - lr) + (ur - ul)) * axy};
      grid.set(i, j, f, true);
    }
  }
  return grid;
}

FeatureGrid feature_map(const MagRaster& raster) {
  const auto [hx, hy] = to_planar(raster);
  return feature_map_planar(raster.values(), raster.nodata_mask(), raster.width(),
                            raster.height(), hx, hy);
}

MagRaster gradient_magnitude_map(const FeatureGrid& features, const MagRaster& source) {
  MagRaster out(features.cells_x(), features.cells_y(),
                source.origin_lon() + 0.5 * source.cell_dlon(),
                source.origin_lat() + 0.5 * source.cell_dlat(), source.cell_dlon(),
                source.cell_dlat(), source.nodata_value());
  for (int j = 0; j < features.cells_y(); ++j) {
    for (int i = 0; i < features.cells_x(); ++i) {
      if (!features.valid(i, j)) {
        out.set_value(i, j, source.nodata_value());
        out.set_nodata(i, j);
        continue;
      }
      const CellFeature f = features.at(i, j);
      out.set_value(i, j, std::hypot(f.gx, f.gy));
    }
  }
  return out;
}

}  // namespace magloc
