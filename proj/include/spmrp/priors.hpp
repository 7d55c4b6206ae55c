#ifndef SPMRP_PRIORS_HPP
#define SPMRP_PRIORS_HPP

#include <Eigen/Dense>

#include "spmrp/gmrf.hpp"
#include "spmrp/rng.hpp"

namespace spmrp {

// P(sigma > u) = a on the standard deviation; induces a type-2 Gumbel on
// the precision with rate lambda = -ln(a)/u.
struct PcPrecisionSpec {
  double u = 0.5;
  double a = 0.1;
  double lambda() const;
};

double pc_precision_logdensity(double tau, const PcPrecisionSpec& spec);
double pc_precision_sample(const PcPrecisionSpec& spec, RngStream& rng);  // returns tau

// PC prior for the BYM2 mixing fraction, built from the scaled structure's
// spectrum; exponential in the distance d(phi), truncated to d(1) and
// calibrated so P(phi < u) = a.
class PcMixingSpec {
 public:
  PcMixingSpec(double u, double a, const ScaledStructure& structure);

  double u() const { return u_; }
  double a() const { return a_; }
  double theta() const { return theta_; }
  double d_max() const { return d_max_; }

  double kld(double phi) const;       // KL divergence to the phi=0 base model
  double distance(double phi) const;  // sqrt(2 * kld)
  double cdf(double phi) const;
  double logdensity(double phi) const;
  double sample(RngStream& rng) const;

 private:
  double d_derivative(double phi) const;
  double u_, a_, theta_, d_max_;
  Eigen::VectorXd tau_tilde_;  // inverse nonzero eigenvalues of the scaled structure
};

double pc_mixing_logdensity(double phi, const PcMixingSpec& spec);

// Weak zero-mean Gaussian, variance 1000.
double fixed_effect_logdensity(double coef);

// logit(rho) ~ Normal(0, 1/0.4); density on the rho scale.
double overdispersion_prior_logdensity(double rho);
double overdispersion_prior_sample(RngStream& rng);  // returns rho

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }
// expit kept away from the exact 0/1 endpoints; transformed-scale
// optimizers may probe arbitrarily large |x|.
inline double expit_clamped(double x) {
  return std::min(1.0 - 1e-10, std::max(1e-10, expit(x)));
}

}  // namespace spmrp

#endif
