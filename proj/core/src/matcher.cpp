#include "magloc/matcher.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "magloc/errors.hpp"

namespace magloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConditionLimit = 1e12;

void check_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw ContractError("asymmetric-input", "covariance must be square");
  const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = r + 1; c < m.cols(); ++c)
      if (std::abs(m(r, c) - m(c, r)) > 1e-9 * scale)
        throw ContractError("asymmetric-input", "covariance must be symmetric");
}

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.d2 != b.d2) return a.d2 < b.d2;
  if (a.j != b.j) return a.j < b.j;
  return a.i < b.i;
}

/// One prepared scan pass: measurement vector and precision matrix in one
/// metric space, plus the pixel offsets corner-space needs.
struct PreparedQuery {
  MetricSpace metric;
  // Gradient space.
  Eigen::Vector3d zy = Eigen::Vector3d::Zero();
  Eigen::Matrix3d zinv = Eigen::Matrix3d::Zero();
  // Corner space (S <= 4).
  int s_count = 0;
  int offset_di[4] = {0, 0, 0, 0};
  int offset_dj[4] = {0, 0, 0, 0};
  Eigen::Vector4d by = Eigen::Vector4d::Zero();
  Eigen::Matrix4d binv = Eigen::Matrix4d::Zero();
};

// Pixel offsets of each corner relative to cell (i, j): LL=(0,1), LR=(1,1),
// UL=(0,0), UR=(1,0).
constexpr int kCornerDi[4] = {0, 1, 0, 1};
constexpr int kCornerDj[4] = {1, 1, 0, 0};

PreparedQuery prepare_query(const MapView& map, const MeasurementSet& meas,
                            MetricSpace metric, double regularization) {
  meas.validate();
  PreparedQuery q;
  q.metric = metric;
  if (metric == MetricSpace::Gradient) {
    const StencilMatrix t = stencil(map.features->hx(), map.features->hy());
    const FeatureMeasurement fm = to_feature_space(meas, t);
    q.zy = fm.z_hat;
    q.zinv = regularized_inverse(fm.sigma_z, regularization);
  } else {
    q.s_count = meas.sensor_count();
    for (int s = 0; s < q.s_count; ++s) {
      const int c = static_cast<int>(meas.corners[s]);
      q.offset_di[s] = kCornerDi[c];
      q.offset_dj[s] = kCornerDj[c];
      q.by[s] = meas.b_hat[s];
    }
    const Eigen::MatrixXd inv = regularized_inverse(meas.sigma_b, regularization);
    q.binv.topLeftCorner(q.s_count, q.s_count) = inv;
  }
  return q;
}

struct ScanView {
  const double* raster_values;
  int raster_width;
  const double* gx;
  const double* gy;
  const double* dxy;
  const std::uint8_t* valid;
  int cells_x;
};

inline double eval_cell(const ScanView& v, const PreparedQuery& q, int i, int j) {
  const std::size_t k = static_cast<std::size_t>(j) * v.cells_x + i;
  if (!v.valid[k]) return kInf;
  if (q.metric == MetricSpace::Gradient) {
    const double r0 = q.zy[0] - v.gx[k];
    const double r1 = q.zy[1] - v.gy[k];
    const double r2 = q.zy[2] - v.dxy[k];
    return r0 * (q.zinv(0, 0) * r0 + q.zinv(0, 1) * r1 + q.zinv(0, 2) * r2) +
           r1 * (q.zinv(1, 0) * r0 + q.zinv(1, 1) * r1 + q.zinv(1, 2) * r2) +
           r2 * (q.zinv(2, 0) * r0 + q.zinv(2, 1) * r1 + q.zinv(2, 2) * r2);
  }
  double r[4];
  for (int s = 0; s < q.s_count; ++s) {
    const std::size_t p =
        static_cast<std::size_t>(j + q.offset_dj[s]) * v.raster_width + i + q.offset_di[s];
    r[s] = q.by[s] - v.raster_values[p];
  }
  double d2 = 0.0;
  for (int a = 0; a < q.s_count; ++a) {
    double acc = 0.0;
    for (int b = 0; b < q.s_count; ++b) acc += q.binv(a, b) * r[b];
    d2 += r[a] * acc;
  }
  return d2;
}

ScanView make_scan_view(const MapView& map) {
  return {map.raster->values().data(), map.raster->width(),
          map.features->gx_plane().data(), map.features->gy_plane().data(),
          map.features->dxy_plane().data(), map.features->valid_mask().data(),
          map.features->cells_x()};
}

RoiRect resolve_roi(const MapView& map, RoiRect roi) {
  if (roi.width == 0 && roi.height == 0)
    roi = {0, 0, map.features->cells_x(), map.features->cells_y()};
  if (roi.i0 < 0 || roi.j0 < 0 || roi.width < 1 || roi.height < 1 ||
      roi.i0 + roi.width > map.features->cells_x() ||
      roi.j0 + roi.height > map.features->cells_y())
    throw ContractError("empty-roi", "ROI must be a nonempty sub-rectangle of the grid");
  return roi;
}

void check_map(const MapView& map) {
  if (map.raster == nullptr || map.features == nullptr)
    throw ContractError("empty-roi", "map view needs both raster and features");
  if (map.features->cells_x() != map.raster->width() - 1 ||
      map.features->cells_y() != map.raster->height() - 1)
    throw ContractError("dimension-mismatch", "feature grid does not match raster");
}

}  // namespace

void MeasurementSet::validate() const {
  const int s = sensor_count();
  if (s < 1 || s > 4)
    throw ContractError("invalid-measurement", "need 1 to 4 observed corners");
  if (b_hat.size() != s || sigma_b.rows() != s || sigma_b.cols() != s)
    throw ContractError("dimension-mismatch",
                        "measurement vector/covariance sizes disagree with corner set");
  for (int a = 0; a < s; ++a) {
    if (!(sigma_b(a, a) > 0.0))
      throw ContractError("singular-covariance", "corner variances must be positive");
    for (int b = a + 1; b < s; ++b)
      if (corners[a] == corners[b])
        throw ContractError("invalid-measurement", "duplicate corner in index set");
  }
  check_symmetric(sigma_b);
}

Eigen::Matrix3d propagate_cov(const StencilMatrix& t, const Eigen::Matrix4d& sigma_b) {
  check_symmetric(sigma_b);
  return t.t * sigma_b * t.t.transpose();
}

FeatureMeasurement to_feature_space(const MeasurementSet& meas, const StencilMatrix& t) {
  meas.validate();
  if (meas.sensor_count() != 4)
    throw ContractError("invalid-measurement",
                        "gradient space needs all four corners (S = 4)");
  for (int s = 0; s < 4; ++s)
    if (static_cast<int>(meas.corners[s]) != s)
      throw ContractError("invalid-measurement",
                          "corners must be ordered (LL, LR, UL, UR)");
  const Eigen::Vector4d b = meas.b_hat;
  return {t.t * b, propagate_cov(t, Eigen::Matrix4d(meas.sigma_b))};
}

double dist_grad(const Eigen::Vector3d& z_hat, const Eigen::Vector3d& z_cell,
                 const Eigen::Matrix3d& sigma_z_inv) {
  const Eigen::Vector3d r = z_hat - z_cell;
  return r.dot(sigma_z_inv * r);
}

double dist_corner(const Eigen::VectorXd& b_hat, const Eigen::VectorXd& b_cell,
                   const Eigen::MatrixXd& sigma_b_inv) {
  if (b_hat.size() != b_cell.size() || sigma_b_inv.rows() != b_hat.size() ||
      sigma_b_inv.cols() != b_hat.size())
    throw ContractError("dimension-mismatch", "corner-distance sizes disagree");
  const Eigen::VectorXd r = b_hat - b_cell;
  return r.dot(sigma_b_inv * r);
}

Eigen::MatrixXd regularized_inverse(const Eigen::MatrixXd& sigma, double ridge_fraction) {
  check_symmetric(sigma);
  const int dim = static_cast<int>(sigma.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  double lambda_min = eig.eigenvalues().minCoeff();
  double lambda_max = eig.eigenvalues().maxCoeff();

  double ridge = 0.0;
  const bool ill =
      !(lambda_min > 0.0) || lambda_max > kConditionLimit * lambda_min;
  if (ill) {
    ridge = ridge_fraction * sigma.trace() / dim;
    if (!(ridge > 0.0) || !(lambda_min + ridge > 0.0))
      throw ContractError("singular-covariance",
                          "covariance not invertible (enable regularization)");
  }
  const Eigen::VectorXd inv_eigs =
      (eig.eigenvalues().array() + ridge).inverse().matrix();
  return eig.eigenvectors() * inv_eigs.asDiagonal() * eig.eigenvectors().transpose();
}

void SearchParams::validate() const {
  if (stride < 1) throw ContractError("invalid-params", "stride must be >= 1");
  if (seeds < 1) throw ContractError("invalid-params", "need at least one seed");
  if (window < 3 || window % 2 == 0)
    throw ContractError("invalid-params", "window side must be odd and >= 3");
  if (!(regularization >= 0.0))
    throw ContractError("invalid-params", "regularization must be >= 0");
}

MatchResult exhaustive_search(const MapView& map, const MeasurementSet& meas,
                              MetricSpace metric, const RoiRect& roi_in,
                              double regularization) {
  check_map(map);
  const RoiRect roi = resolve_roi(map, roi_in);
  const auto t0 = std::chrono::steady_clock::now();
  const PreparedQuery q = prepare_query(map, meas, metric, regularization);
  const ScanView view = make_scan_view(map);

  MatchResult result;
  result.d2_min = kInf;
  std::vector<Candidate> top;
  for (int j = roi.j0; j < roi.j0 + roi.height; ++j) {
    for (int i = roi.i0; i < roi.i0 + roi.width; ++i) {
      const double d2 = eval_cell(view, q, i, j);
      ++result.coarse_evals;
      if (d2 == kInf) continue;
      if (d2 < result.d2_min) {
        result.d2_min = d2;
        result.i = i;
        result.j = j;
      }
      const Candidate c{d2, i, j};
      auto pos = std::lower_bound(top.begin(), top.end(), c, candidate_less);
      if (pos != top.end() || top.size() < 5) {
        top.insert(pos, c);
        if (top.size() > 5) top.pop_back();
      }
    }
  }
  if (result.d2_min == kInf)
    throw ContractError("empty-roi", "no valid cell in the ROI");
  result.top_k = std::move(top);
  result.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

MatchResult coarse_to_fine_search(const MapView& map, const MeasurementSet& meas,
                                  const SearchParams& params) {
  check_map(map);
  params.validate();
  const RoiRect roi = resolve_roi(map, params.roi);
  const auto t0 = std::chrono::steady_clock::now();

  MetricSpace coarse_metric, refine_metric;
  switch (params.metric) {
    case MetricPipeline::Gradient:
      coarse_metric = refine_metric = MetricSpace::Gradient;
      break;
    case MetricPipeline::Corner:
      coarse_metric = refine_metric = MetricSpace::Corner;
      break;
    case MetricPipeline::GradThenCorner:
      coarse_metric = MetricSpace::Gradient;
      refine_metric = MetricSpace::Corner;
      break;
    case MetricPipeline::CornerThenGrad:
      coarse_metric = MetricSpace::Corner;
      refine_metric = MetricSpace::Gradient;
      break;
  }
  const PreparedQuery q_coarse =
      prepare_query(map, meas, coarse_metric, params.regularization);
  const PreparedQuery q_refine =
      params.metric == MetricPipeline::Gradient || params.metric == MetricPipeline::Corner
          ? q_coarse
          : prepare_query(map, meas, refine_metric, params.regularization);
  const ScanView view = make_scan_view(map);

  MatchResult result;

  // Coarse pass: every lattice point counts, masked cells score +inf, so
  // coarse_evals == ceil(rows/s) * ceil(cols/s) exactly.
  std::vector<Candidate> coarse;
  coarse.reserve(static_cast<std::size_t>((roi.width + params.stride - 1) / params.stride) *
                 ((roi.height + params.stride - 1) / params.stride));
  for (int j = roi.j0; j < roi.j0 + roi.height; j += params.stride) {
    for (int i = roi.i0; i < roi.i0 + roi.width; i += params.stride) {
      coarse.push_back({eval_cell(view, q_coarse, i, j), i, j});
      ++result.coarse_evals;
    }
  }

  const std::size_t seed_count =
      std::min<std::size_t>(params.seeds, coarse.size());
  std::partial_sort(coarse.begin(), coarse.begin() + seed_count, coarse.end(),
                    candidate_less);
  std::vector<Candidate> seeds;
  for (std::size_t k = 0; k < seed_count; ++k)
    if (coarse[k].d2 != kInf) seeds.push_back(coarse[k]);
  if (seeds.empty())
    throw ContractError("empty-roi", "no valid cell on the coarse lattice");

  // Refined ROI: union of window boxes around the seeds, clipped to the
  // ROI, visited in row-major order for deterministic tie-breaking.
  const int half = params.window / 2;
  std::vector<Candidate> refined;
  std::vector<std::pair<int, int>> cells;
  for (const Candidate& s : seeds) {
    const int j_lo = std::max(roi.j0, s.j - half);
    const int j_hi = std::min(roi.j0 + roi.height - 1, s.j + half);
    const int i_lo = std::max(roi.i0, s.i - half);
    const int i_hi = std::min(roi.i0 + roi.width - 1, s.i + half);
    for (int j = j_lo; j <= j_hi; ++j)
      for (int i = i_lo; i <= i_hi; ++i) cells.emplace_back(j, i);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  result.d2_min = kInf;
  for (const auto& [j, i] : cells) {
    const double d2 = eval_cell(view, q_refine, i, j);
    ++result.refine_evals;
    if (d2 == kInf) continue;
    if (d2 < result.d2_min) {
      result.d2_min = d2;
      result.i = i;
      result.j = j;
    }
    const Candidate c{d2, i, j};
    auto pos = std::lower_bound(refined.begin(), refined.end(), c, candidate_less);
    if (pos != refined.end() || refined.size() < static_cast<std::size_t>(params.seeds))
      refined.insert(pos, c);
    if (refined.size() > static_cast<std::size_t>(params.seeds)) refined.pop_back();
  }
  if (result.d2_min == kInf)
    throw ContractError("empty-roi", "refined ROI contains no valid cell");
  result.top_k = std::move(refined);
  result.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

MatchResult two_metric_search(const MapView& map, const MeasurementSet& meas,
                              const SearchParams& params) {
  return coarse_to_fine_search(map, meas, params);
}

}  // namespace magloc
