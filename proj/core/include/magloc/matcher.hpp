#pragma once
#include <Eigen/Dense>
#include <vector>

#include "magloc/features.hpp"
#include "magloc/raster.hpp"

namespace magloc {

enum class CornerId { LL = 0, LR = 1, UL = 2, UR = 3 };

/// Which signature a search pass compares.
enum class MetricSpace { Gradient, Corner };

/// Search configuration: single-metric pipelines use the same space for
/// the coarse and refine passes; the two-metric pipelines switch spaces
/// between passes.
enum class MetricPipeline { Gradient, Corner, GradThenCorner, CornerThenGrad };

/// Noisy field estimates at a subset of cell corners (nT) with their
/// covariance (nT^2). Corner order is the fixed (LL, LR, UL, UR) sequence
/// restricted to the observed subset.
struct MeasurementSet {
  std::vector<CornerId> corners;
  Eigen::VectorXd b_hat;
  Eigen::MatrixXd sigma_b;

  int sensor_count() const { return static_cast<int>(corners.size()); }
  void validate() const;
};

/// Gradient-space image of a 4-corner MeasurementSet: z = T b,
/// Sigma_z = T Sigma_b T^T.
struct FeatureMeasurement {
  Eigen::Vector3d z_hat;
  Eigen::Matrix3d sigma_z;
};

/// Linear error propagation Sigma_z = T Sigma_b T^T. Throws
/// ContractError("asymmetric-input") when sigma_b is not symmetric.
Eigen::Matrix3d propagate_cov(const StencilMatrix& t, const Eigen::Matrix4d& sigma_b);

/// Requires all four corners in (LL, LR, UL, UR) order.
FeatureMeasurement to_feature_space(const MeasurementSet& meas, const StencilMatrix& t);

/// Gradient-space squared Mahalanobis distance
/// (z_hat - z_cell)^T Sigma_z^{-1} (z_hat - z_cell).
double dist_grad(const Eigen::Vector3d& z_hat, const Eigen::Vector3d& z_cell,
                 const Eigen::Matrix3d& sigma_z_inv);

/// Corner-space squared Mahalanobis distance over the observed subset.
double dist_corner(const Eigen::VectorXd& b_hat, const Eigen::VectorXd& b_cell,
                   const Eigen::MatrixXd& sigma_b_inv);

/// Symmetric positive-definite inverse with ridge regularization: when the
/// condition number exceeds 1e12 (or the matrix is not PD), adds
/// lambda * I with lambda = ridge_fraction * trace / dim before inverting.
/// Throws ContractError("singular-covariance") if that still fails and
/// ContractError("asymmetric-input") for asymmetric input.
Eigen::MatrixXd regularized_inverse(const Eigen::MatrixXd& sigma, double ridge_fraction);

/// Rectangular region in cell coordinates. width == 0 selects the full
/// feature grid.
struct RoiRect {
  int i0 = 0, j0 = 0, width = 0, height = 0;
};

struct SearchParams {
  RoiRect roi;                 ///< region of interest, cell indices
  int stride = 25;             ///< coarse lattice step s >= 1
  int seeds = 5;               ///< K0 coarse seeds kept
  int window = 51;             ///< odd side of each refinement box, >= 3
  MetricPipeline metric = MetricPipeline::Gradient;
  double regularization = 1e-9; ///< ridge fraction for near-singular Sigma

  void validate() const;
};

struct Candidate {
  double d2;
  int i, j;
};

struct MatchResult {
  int i = 0, j = 0;            ///< matched cell
  double d2_min = 0.0;         ///< distance at the matched cell
  std::vector<Candidate> top_k;///< best refined candidates, ranked
  long coarse_evals = 0;       ///< strided lattice points visited
  long refine_evals = 0;       ///< refined-ROI cells visited (<= window^2 * K0)
  double elapsed_s = 0.0;      ///< wall clock of the query
};

/// Read-only bundle a query scans over. `features` supplies both the
/// gradient signatures and the cell validity mask (a cell is excluded from
/// every search when its 2x2 stencil touches nodata), `raster` the corner
/// values.
struct MapView {
  const MagRaster* raster = nullptr;
  const FeatureGrid* features = nullptr;
};

/// Exact argmin of the metric over the ROI; ties go to the smallest
/// row-major (j, i). The coarse-to-fine search degenerates to this at
/// stride 1. Throws ContractError("empty-roi") when no valid cell exists.
MatchResult exhaustive_search(const MapView& map, const MeasurementSet& meas,
                              MetricSpace metric, const RoiRect& roi,
                              double regularization = 1e-9);

/// Strided coarse scan, K0 seed selection, and exact rescan of the union
/// of window-sized boxes around the seeds. Single-metric pipelines rescan
/// with the coarse metric; two-metric pipelines rescan with the second
/// metric and the final argmin is taken under it.
MatchResult coarse_to_fine_search(const MapView& map, const MeasurementSet& meas,
                                  const SearchParams& params);

/// Alias of coarse_to_fine_search for the two-metric pipelines.
MatchResult two_metric_search(const MapView& map, const MeasurementSet& meas,
                              const SearchParams& params);

}  // namespace magloc
