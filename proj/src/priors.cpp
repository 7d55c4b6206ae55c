#include "spmrp/priors.hpp"

#include <cmath>

#include "spmrp/errors.hpp"

namespace spmrp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

double PcPrecisionSpec::lambda() const {
  if (!(u > 0.0) || !(a > 0.0 && a < 1.0)) throw InputError("pc precision spec: need u > 0, a in (0,1)");
  return -std::log(a) / u;
}

double pc_precision_logdensity(double tau, const PcPrecisionSpec& spec) {
  if (!(tau > 0.0)) throw InputError("pc_precision_logdensity: tau must be positive");
  const double lambda = spec.lambda();
  return std::log(lambda / 2.0) - 1.5 * std::log(tau) - lambda / std::sqrt(tau);
}

double pc_precision_sample(const PcPrecisionSpec& spec, RngStream& rng) {
  // sigma ~ Exponential(lambda), tau = sigma^-2
  const double sigma = -std::log(rng.uniform()) / spec.lambda();
  return 1.0 / (sigma * sigma);
}

PcMixingSpec::PcMixingSpec(double u, double a, const ScaledStructure& structure)
    : u_(u), a_(a) {
  if (!(u > 0.0 && u < 1.0)) throw InputError("pc mixing spec: u must lie in (0,1)");
  if (!(a > 0.0 && a < 1.0)) throw InputError("pc mixing spec: a must lie in (0,1)");
  const Eigen::VectorXd eigs = structure.eigenvalues();  // ascending
  const int n = static_cast<int>(eigs.size());
  const int null_dim = structure.base.rank_deficiency;
  const int m = n - null_dim;
  if (m <= 0) throw InputError("pc mixing spec: structure has no informative directions");
  tau_tilde_.resize(m);
  for (int i = 0; i < m; ++i) {
    const double g = eigs[null_dim + i];
    if (!(g > 1e-12)) throw NumericError("pc mixing spec: unexpected near-zero eigenvalue");
    tau_tilde_[i] = 1.0 / g;
  }
  d_max_ = distance(1.0);

  // Calibrate the rate so P(phi < u) = a under the truncated exponential.
  const double du = distance(u_);
  auto prob = [&](double theta) {
    if (std::abs(theta) < 1e-12) return du / d_max_;
    return std::expm1(-theta * du) / std::expm1(-theta * d_max_);
  };
  double lo = -1.0, hi = 1.0;
  int guard = 0;
  while (prob(lo) > a_ && guard++ < 64) lo *= 2.0;
  while (prob(hi) < a_ && guard++ < 128) hi *= 2.0;
  if (prob(lo) > a_ || prob(hi) < a_)
    throw NumericError("pc mixing spec: calibration failed for the requested probability statement");
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(prob(mid) - a_) < 1e-10) { lo = hi = mid; break; }
    (prob(mid) < a_ ? lo : hi) = mid;
  }
  theta_ = 0.5 * (lo + hi);
  if (std::abs(prob(theta_) - a_) > 1e-8)
    throw NumericError("pc mixing spec: bisection did not reach probability tolerance");
}

double PcMixingSpec::kld(double phi) const {
  if (phi < 0.0 || phi > 1.0) throw InputError("pc mixing: phi outside [0,1]");
  double s = 0.0;
  for (int i = 0; i < tau_tilde_.size(); ++i)
    s += phi * tau_tilde_[i] - std::log1p(phi * (tau_tilde_[i] - 1.0));
  return 0.5 * s;
}

double PcMixingSpec::distance(double phi) const { return std::sqrt(2.0 * kld(phi)); }

double PcMixingSpec::d_derivative(double phi) const {
  double s = 0.0;
  for (int i = 0; i < tau_tilde_.size(); ++i)
    s += tau_tilde_[i] - (tau_tilde_[i] - 1.0) / (1.0 + phi * (tau_tilde_[i] - 1.0));
  return 0.5 * s / distance(phi);
}

double PcMixingSpec::cdf(double phi) const {
  if (phi <= 0.0) return 0.0;
  if (phi >= 1.0) return 1.0;
  const double d = distance(phi);
  if (std::abs(theta_) < 1e-12) return d / d_max_;
  return std::expm1(-theta_ * d) / std::expm1(-theta_ * d_max_);
}

double PcMixingSpec::logdensity(double phi) const {
  if (!(phi > 0.0 && phi < 1.0)) throw InputError("pc_mixing_logdensity: phi must lie in (0,1)");
  const double norm =
      std::abs(theta_) < 1e-12 ? 1.0 / d_max_ : theta_ / (-std::expm1(-theta_ * d_max_));
  return std::log(norm) - theta_ * distance(phi) + std::log(d_derivative(phi));
}

double PcMixingSpec::sample(RngStream& rng) const {
  const double p = rng.uniform();
  double target;
  if (std::abs(theta_) < 1e-12) {
    target = p * d_max_;
  } else {
    target = -std::log1p(p * std::expm1(-theta_ * d_max_)) / theta_;
  }
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (distance(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double pc_mixing_logdensity(double phi, const PcMixingSpec& spec) { return spec.logdensity(phi); }

double fixed_effect_logdensity(double coef) {
  constexpr double var = 1000.0;
  return -0.5 * (kLog2Pi + std::log(var)) - coef * coef / (2.0 * var);
}

double overdispersion_prior_logdensity(double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw InputError("overdispersion_prior_logdensity: rho must lie in (0,1)");
  constexpr double var = 1.0 / 0.4;
  const double t = logit(rho);
  const double log_jacobian = -std::log(rho) - std::log(1.0 - rho);
  return -0.5 * (kLog2Pi + std::log(var)) - t * t / (2.0 * var) + log_jacobian;
}

double overdispersion_prior_sample(RngStream& rng) {
  constexpr double sd = 1.5811388300841896660;  // sqrt(1/0.4)
  return expit(sd * rng.normal());
}

}  // namespace spmrp
