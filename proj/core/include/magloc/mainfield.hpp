#pragma once
#include <memory>
#include <string>

#include "magloc/raster.hpp"

namespace magloc {

/// Smooth core-field model evaluated at pixel centers when synthesizing
/// total-field maps. Implementations throw
/// ContractError("provider-domain-error") outside their domain.
class MainFieldProvider {
 public:
  virtual ~MainFieldProvider() = default;
  /// Total main-field intensity at (lat, lon), nT.
  virtual double value_nt(double lat_deg, double lon_deg) const = 0;
  virtual std::string describe() const = 0;
};

/// Spatially uniform main field.
class ConstantMainField final : public MainFieldProvider {
 public:
  explicit ConstantMainField(double value_nt) : value_nt_(value_nt) {}
  double value_nt(double, double) const override { return value_nt_; }
  std::string describe() const override;

 private:
  double value_nt_;
};

/// Tilted-dipole approximation: B = B0 * sqrt(1 + 3 sin^2(lambda_m)) where
/// lambda_m is the geomagnetic latitude relative to the configured
/// geomagnetic north pole. Defaults: B0 = 30,000 nT, pole at
/// (80.65 N, -72.68 E).
class DipoleMainField final : public MainFieldProvider {
 public:
  DipoleMainField(double equator_nt = 30000.0, double pole_lat_deg = 80.65,
                  double pole_lon_deg = -72.68);
  double value_nt(double lat_deg, double lon_deg) const override;
  std::string describe() const override;

  /// sin of the geomagnetic latitude of (lat, lon).
  double sin_geomagnetic_latitude(double lat_deg, double lon_deg) const;

 private:
  double equator_nt_, pole_lat_deg_, pole_lon_deg_;
};

/// Main field read from a precomputed grid (e.g. an externally evaluated
/// IGRF raster) with bilinear interpolation between pixel centers.
/// Querying outside the grid extent or across nodata pixels is a
/// provider-domain-error.
class RasterMainField final : public MainFieldProvider {
 public:
  explicit RasterMainField(MagRaster grid);
  double value_nt(double lat_deg, double lon_deg) const override;
  std::string describe() const override;

 private:
  MagRaster grid_;
};

/// Per-pixel sum B_total = B_main(lat, lon) + B_anomaly. The nodata mask
/// of the anomaly raster is preserved.
MagRaster total_field(const MagRaster& anomaly, const MainFieldProvider& main);

}  // namespace magloc
