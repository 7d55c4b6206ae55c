#ifndef SPMRP_LIKELIHOOD_HPP
#define SPMRP_LIKELIHOOD_HPP

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "spmrp/ingest.hpp"

namespace spmrp {

// log P(y | n, theta, rho) for the beta-binomial with mean theta and
// correlation-type overdispersion rho: a = theta(1-rho)/rho,
// b = (1-theta)(1-rho)/rho. Converges to the binomial as rho -> 0+.
double betabinom_logpmf(long y, long n, double theta, double rho);

// First and second derivatives with respect to eta = logit(theta).
struct BetabinomDerivs {
  double logpmf;
  double d_eta;
  double d2_eta;
};
BetabinomDerivs betabinom_eta_derivs(long y, long n, double eta, double rho);

// Per-cell selection of latent entries; the linear predictor is the plain
// sum of the selected entries.
struct LinearPredictorMap {
  struct CellTerms {
    std::array<int, 4> idx{-1, -1, -1, -1};
    int count = 0;
    void add(int i) { idx[count++] = i; }
  };
  std::vector<CellTerms> cells;
  int latent_dim = 0;

  int n_cells() const { return static_cast<int>(cells.size()); }
};

double linear_predictor(const LinearPredictorMap& map, const Eigen::VectorXd& latent, int cell);

Eigen::VectorXd linear_predictor_all(const LinearPredictorMap& map, const Eigen::VectorXd& latent);

// Sum of betabinom_logpmf over observed cells; unobserved cells contribute 0.
double total_loglik(const CellTable& cells, const LinearPredictorMap& map,
                    const Eigen::VectorXd& latent, double rho);

// Gradient of total_loglik with respect to the latent vector.
Eigen::VectorXd total_loglik_gradient(const CellTable& cells, const LinearPredictorMap& map,
                                      const Eigen::VectorXd& latent, double rho);

// Per-cell eta-scale first/second derivatives for the observed cells
// (zeros elsewhere); used to assemble Newton systems.
void loglik_eta_derivs(const CellTable& cells, const LinearPredictorMap& map,
                       const Eigen::VectorXd& latent, double rho, double* loglik,
                       Eigen::VectorXd* d1, Eigen::VectorXd* d2);

}  // namespace spmrp

#endif
