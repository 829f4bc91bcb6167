#pragma once
#include "magloc/raster.hpp"
#include "magloc/rng.hpp"

namespace magloc {

/// Recipe for a smooth random anomaly field: a sum of Gaussian bumps with
/// random centers, widths and signed amplitudes, rescaled so that
/// max |value| <= amplitude_nt.
struct SynthSpec {
  int width = 200;
  int height = 200;
  double origin_lat = 35.0;    ///< lower-left corner, degrees
  double origin_lon = -100.0;
  double cell_deg = 30.0 / 3600.0; ///< 30 arc-seconds
  double amplitude_nt = 400.0;
  int blob_count = 40;
  double blob_min_width_m = 3000.0;
  double blob_max_width_m = 8000.0;

  void validate() const;
};

/// Deterministic synthetic anomaly raster: identical (spec, stream) pairs
/// produce identical grids.
MagRaster synth_map(const SynthSpec& spec, RngStream& rng);

}  // namespace magloc
