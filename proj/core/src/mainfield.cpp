#include "magloc/mainfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magloc/errors.hpp"

namespace magloc {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

std::string ConstantMainField::describe() const {
  std::ostringstream os;
  os << "constant main field " << value_nt_ << " nT";
  return os.str();
}

DipoleMainField::DipoleMainField(double equator_nt, double pole_lat_deg,
                                 double pole_lon_deg)
    : equator_nt_(equator_nt),
      pole_lat_deg_(pole_lat_deg),
      pole_lon_deg_(pole_lon_deg) {
  if (!(equator_nt > 0.0))
    throw ContractError("provider-domain-error", "dipole strength must be positive");
}

double DipoleMainField::sin_geomagnetic_latitude(double lat_deg, double lon_deg) const {
  const double phi = lat_deg * kDegToRad;
  const double phi_p = pole_lat_deg_ * kDegToRad;
  const double dlon = (lon_deg - pole_lon_deg_) * kDegToRad;
  // Cosine of the angular distance to the geomagnetic pole equals the sine
  // of the geomagnetic latitude.
  return std::clamp(
      std::sin(phi_p) * std::sin(phi) + std::cos(phi_p) * std::cos(phi) * std::cos(dlon),
      -1.0, 1.0);
}

double DipoleMainField::value_nt(double lat_deg, double lon_deg) const {
  const double s = sin_geomagnetic_latitude(lat_deg, lon_deg);
  return equator_nt_ * std::sqrt(1.0 + 3.0 * s * s);
}

std::string DipoleMainField::describe() const {
  std::ostringstream os;
  os << "tilted dipole, equatorial " << equator_nt_ << " nT, pole ("
     << pole_lat_deg_ << ", " << pole_lon_deg_ << ")";
  return os.str();
}

RasterMainField::RasterMainField(MagRaster grid) : grid_(std::move(grid)) {}

double RasterMainField::value_nt(double lat_deg, double lon_deg) const {
  // Fractional pixel coordinates relative to pixel centers.
  const double fi = (lon_deg - grid_.origin_lon()) / grid_.cell_dlon() - 0.5;
  const double fj = (grid_.origin_lat() + grid_.height() * grid_.cell_dlat() - lat_deg) /
                        grid_.cell_dlat() - 0.5;
  const int i0 = static_cast<int>(std::floor(fi));
  const int j0 = static_cast<int>(std::floor(fj));
  if (i0 < 0 || i0 + 1 >= grid_.width() || j0 < 0 || j0 + 1 >= grid_.height())
    throw ContractError("provider-domain-error",
                        "query point outside the main-field grid");
  if (grid_.is_nodata(i0, j0) || grid_.is_nodata(i0 + 1, j0) ||
      grid_.is_nodata(i0, j0 + 1) || grid_.is_nodata(i0 + 1, j0 + 1))
    throw ContractError("provider-domain-error", "main-field grid has a gap here");
  const double wx = fi - i0;
  const double wy = fj - j0;
  const double top = grid_.value(i0, j0) * (1.0 - wx) + grid_.value(i0 + 1, j0) * wx;
  const double bot =
      grid_.value(i0, j0 + 1) * (1.0 - wx) + grid_.value(i0 + 1, j0 + 1) * wx;
  return top * (1.0 - wy) + bot * wy;
}

std::string RasterMainField::describe() const {
  std::ostringstream os;
  os << "raster main field " << grid_.width() << "x" << grid_.height();
  return os.str();
}

MagRaster total_field(const MagRaster& anomaly, const MainFieldProvider& main) {
  MagRaster out = anomaly;
  for (int j = 0; j < anomaly.height(); ++j) {
    const double lat = anomaly.pixel_lat(j);
    for (int i = 0; i < anomaly.width(); ++i) {
      if (anomaly.is_nodata(i, j)) continue;
      out.set_value(i, j, main.value_nt(lat, anomaly.pixel_lon(i)) + anomaly.value(i, j));
    }
  }
  return out;
}

}  // namespace magloc
