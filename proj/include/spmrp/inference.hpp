#ifndef SPMRP_INFERENCE_HPP
#define SPMRP_INFERENCE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "spmrp/model.hpp"

namespace spmrp {

struct FitConfig {
  double grid_step = 0.75;       // in posterior-sd units per transformed axis
  double log_drop = 4.0;         // keep grid points within this log-posterior drop
  double newton_tol = 1e-8;      // gradient sup-norm
  int newton_max_iter = 100;
  double nm_tol = 1e-6;          // Nelder-Mead function spread
  int nm_max_eval = 4000;
  int max_grid_points = 4096;
  int star_dim_threshold = 5;    // axis-star design at this many hypers and up
  int retries = 3;
  double hessian_step = 0.1;
  int workers = 0;               // 0 = default_workers()
};

// Gaussian approximation of the latent conditional at one hyperparameter
// point.
struct LaplaceSummary {
  Eigen::VectorXd mode;    // unconstrained conditional mode
  Eigen::VectorXd mean_c;  // mode after the conditioning-by-kriging correction
  Eigen::VectorXd curvature;  // per-cell -d2 loglik / d eta2 at the mode
  double log_marginal = 0.0;  // Laplace log p(y | psi), constants dropped
  int iterations = 0;
  bool converged = false;
  bool ridged = false;  // a Levenberg ridge was needed somewhere
};

struct GridPoint {
  Eigen::VectorXd psi;
  Eigen::VectorXd mode;
  Eigen::VectorXd mean_c;
  Eigen::VectorXd curvature;  // lets sampling rebuild the Gaussian without data
  double log_post = 0.0;      // unnormalized log posterior
  double weight = 0.0;
  int newton_iterations = 0;
};

struct FitDiagnostics {
  bool converged = false;
  int nm_evaluations = 0;
  int retries_used = 0;
  int grid_points = 0;
  bool grid_capped = false;
  bool ridged = false;
  std::string grid_design;  // "lattice" or "star"
  std::vector<double> psi_sd;
};

struct PosteriorFit {
  std::vector<GridPoint> points;
  Eigen::VectorXd psi_mode;
  Eigen::VectorXd psi_sd;
  FitDiagnostics diagnostics;
};

// S draws of cell-level probabilities, with the overdispersion draw that
// accompanied each.
struct ThetaDraws {
  int S = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd theta;  // S x n_cells, entries in (0,1)
  Eigen::VectorXd rho;    // per draw

  std::string to_csv(const StrataScheme& scheme) const;
  static ThetaDraws from_csv_file(const std::string& path, const StrataScheme& scheme);
};

// Latent log-posterior at fixed hyperparameters (likelihood plus the
// quadratic prior kernel); the surface the inner Newton climbs.
double latent_logpost(const LatentModel& model, const CellTable& cells, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& psi);
Eigen::VectorXd latent_logpost_gradient(const LatentModel& model, const CellTable& cells,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& psi);
Eigen::MatrixXd latent_logpost_hessian(const LatentModel& model, const CellTable& cells,
                                       const Eigen::VectorXd& x, const Eigen::VectorXd& psi);

LaplaceSummary laplace_at(const LatentModel& model, const CellTable& cells,
                          const Eigen::VectorXd& psi, const FitConfig& config = {},
                          const Eigen::VectorXd* warm_start = nullptr);

PosteriorFit fit(const LatentModel& model, const CellTable& cells, const FitConfig& config = {});

ThetaDraws sample_theta(const PosteriorFit& fit, const LatentModel& model, int S,
                        std::uint64_t seed);
// Constrained latent draws (row per draw); same streams as sample_theta.
Eigen::MatrixXd sample_latent(const PosteriorFit& fit, const LatentModel& model, int S,
                              std::uint64_t seed);

struct CpoResult {
  Eigen::VectorXd cpo;  // per cell; unobserved cells hold NaN
  double lcpo = 0.0;    // negative mean log CPO over observed cells
  int floor_hits = 0;   // draws where the pmf floor guarded a zero
};

CpoResult compute_cpo(const ThetaDraws& draws, const CellTable& cells);
CpoResult compute_cpo(const PosteriorFit& fit, const LatentModel& model, const CellTable& cells,
                      int S, std::uint64_t seed);

}  // namespace spmrp

#endif
