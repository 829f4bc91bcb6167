#include "magloc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "magloc/errors.hpp"

namespace magloc {

void SynthSpec::validate() const {
  if (width < 4 || height < 4)
    throw ContractError("dimension-mismatch", "synthetic maps must be at least 4x4");
  if (!(cell_deg > 0.0) || !(amplitude_nt >= 0.0) || blob_count < 0)
    throw ContractError("invalid-config", "bad synthetic map parameters");
  if (!(blob_min_width_m > 0.0) || blob_max_width_m < blob_min_width_m)
    throw ContractError("invalid-config", "bad blob width range");
}

MagRaster synth_map(const SynthSpec& spec, RngStream& rng) {
  spec.validate();
  MagRaster raster(spec.width, spec.height, spec.origin_lon, spec.origin_lat,
                   spec.cell_deg, spec.cell_deg);
  const auto [hx, hy] = to_planar(raster);
  const double extent_x = spec.width * hx;
  const double extent_y = spec.height * hy;

  struct Blob {
    double x, y, width, amplitude;
  };
  std::vector<Blob> blobs(spec.blob_count);
  for (Blob& b : blobs) {
    b.x = rng.uniform(0.0, extent_x);
    b.y = rng.uniform(0.0, extent_y);
    b.width = rng.uniform(spec.blob_min_width_m, spec.blob_max_width_m);
    b.amplitude = rng.uniform(-spec.amplitude_nt, spec.amplitude_nt);
  }

  std::vector<double> field(static_cast<std::size_t>(spec.width) * spec.height, 0.0);
  for (const Blob& b : blobs) {
    // A bump is negligible beyond 4 widths; only touch those pixels.
    const double reach = 4.0 * b.width;
    const int i_lo = std::max(0, static_cast<int>(std::floor((b.x - reach) / hx)));
    const int i_hi =
        std::min(spec.width - 1, static_cast<int>(std::ceil((b.x + reach) / hx)));
    const int j_lo = std::max(
        0, spec.height - 1 - static_cast<int>(std::ceil((b.y + reach) / hy)));
    const int j_hi = std::min(
        spec.height - 1,
        spec.height - 1 - static_cast<int>(std::floor((b.y - reach) / hy)));
    const double inv_2w2 = 1.0 / (2.0 * b.width * b.width);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double y = (spec.height - 1 - j) * hy;
      const double dy2 = (y - b.y) * (y - b.y);
      for (int i = i_lo; i <= i_hi; ++i) {
        const double dx = i * hx - b.x;
        field[static_cast<std::size_t>(j) * spec.width + i] +=
            b.amplitude * std::exp(-(dx * dx + dy2) * inv_2w2);
      }
    }
  }

  double peak = 0.0;
  for (double v : field) peak = std::max(peak, std::abs(v));
  const double scale =
      peak > spec.amplitude_nt && peak > 0.0 ? spec.amplitude_nt / peak : 1.0;
  for (int j = 0; j < spec.height; ++j)
    for (int i = 0; i < spec.width; ++i)
      raster.set_value(i, j, scale * field[static_cast<std::size_t>(j) * spec.width + i]);
  return raster;
}

}  // namespace magloc
