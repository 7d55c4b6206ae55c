#include "spmrp/likelihood.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>

#include "spmrp/errors.hpp"
#include "spmrp/priors.hpp"

namespace spmrp {

namespace {

// Beyond this the lgamma differences cancel catastrophically; the exact
// O(n) product form takes over.
constexpr double kLargeConcentration = 1e6;

double log_choose(long n, long y) {
  return std::lgamma(n + 1.0) - std::lgamma(y + 1.0) - std::lgamma(n - y + 1.0);
}

void check_domain(long y, long n, double theta, double rho) {
  if (n < 0 || y < 0 || y > n) throw InputError("betabinom: need 0 <= y <= n");
  if (!(theta > 0.0 && theta < 1.0)) throw InputError("betabinom: theta must lie in (0,1)");
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("betabinom: rho must lie in (0,1)");
}

}  // namespace

double betabinom_logpmf(long y, long n, double theta, double rho) {
  check_domain(y, n, theta, rho);
  if (n == 0) return 0.0;
  const double c = (1.0 - rho) / rho;
  const double a = theta * c;
  const double b = (1.0 - theta) * c;
  if (c > kLargeConcentration) {
    double s = log_choose(n, y);
    for (long t = 0; t < y; ++t) s += std::log(a + t);
    for (long t = 0; t < n - y; ++t) s += std::log(b + t);
    for (long t = 0; t < n; ++t) s -= std::log(c + t);
    return s;
  }
  return log_choose(n, y) + std::lgamma(y + a) + std::lgamma(n - y + b) - std::lgamma(n + c) +
         std::lgamma(c) - std::lgamma(a) - std::lgamma(b);
}

BetabinomDerivs betabinom_eta_derivs(long y, long n, double eta, double rho) {
  double theta = expit(eta);
  theta = std::min(1.0 - 1e-12, std::max(1e-12, theta));
  BetabinomDerivs out{0.0, 0.0, 0.0};
  if (n == 0) return out;
  out.logpmf = betabinom_logpmf(y, n, theta, rho);
  const double c = (1.0 - rho) / rho;
  const double a = theta * c;
  const double b = (1.0 - theta) * c;
  double d1_theta, d2_theta;
  if (c > kLargeConcentration) {
    double sa = 0.0, sb = 0.0, sa2 = 0.0, sb2 = 0.0;
    for (long t = 0; t < y; ++t) {
      sa += 1.0 / (a + t);
      sa2 += 1.0 / ((a + t) * (a + t));
    }
    for (long t = 0; t < n - y; ++t) {
      sb += 1.0 / (b + t);
      sb2 += 1.0 / ((b + t) * (b + t));
    }
    d1_theta = c * (sa - sb);
    d2_theta = -c * c * (sa2 + sb2);
  } else {
    using boost::math::digamma;
    using boost::math::trigamma;
    d1_theta = c * (digamma(y + a) - digamma(a)) - c * (digamma(n - y + b) - digamma(b));
    d2_theta = c * c * (trigamma(y + a) - trigamma(a)) + c * c * (trigamma(n - y + b) - trigamma(b));
  }
  const double w = theta * (1.0 - theta);
  out.d_eta = d1_theta * w;
  out.d2_eta = d2_theta * w * w + d1_theta * w * (1.0 - 2.0 * theta);
  return out;
}

double linear_predictor(const LinearPredictorMap& map, const Eigen::VectorXd& latent, int cell) {
  if (cell < 0 || cell >= map.n_cells()) throw InputError("linear_predictor: cell out of range");
  if (latent.size() != map.latent_dim) throw InputError("linear_predictor: latent dimension mismatch");
  const auto& terms = map.cells[cell];
  double s = 0.0;
  for (int t = 0; t < terms.count; ++t) {
    const int ix = terms.idx[t];
    if (ix < 0 || ix >= latent.size()) throw InputError("linear_predictor: index out of range");
    s += latent[ix];
  }
  return s;
}

Eigen::VectorXd linear_predictor_all(const LinearPredictorMap& map, const Eigen::VectorXd& latent) {
  Eigen::VectorXd eta(map.n_cells());
  for (int c = 0; c < map.n_cells(); ++c) eta[c] = linear_predictor(map, latent, c);
  return eta;
}

double total_loglik(const CellTable& cells, const LinearPredictorMap& map,
                    const Eigen::VectorXd& latent, double rho) {
  double ll = 0.0;
  loglik_eta_derivs(cells, map, latent, rho, &ll, nullptr, nullptr);
  return ll;
}

Eigen::VectorXd total_loglik_gradient(const CellTable& cells, const LinearPredictorMap& map,
                                      const Eigen::VectorXd& latent, double rho) {
  Eigen::VectorXd d1(map.n_cells());
  loglik_eta_derivs(cells, map, latent, rho, nullptr, &d1, nullptr);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(map.latent_dim);
  for (int c = 0; c < map.n_cells(); ++c) {
    const auto& terms = map.cells[c];
    for (int t = 0; t < terms.count; ++t) grad[terms.idx[t]] += d1[c];
  }
  return grad;
}

void loglik_eta_derivs(const CellTable& cells, const LinearPredictorMap& map,
                       const Eigen::VectorXd& latent, double rho, double* loglik,
                       Eigen::VectorXd* d1, Eigen::VectorXd* d2) {
  if (static_cast<int>(cells.cells.size()) != map.n_cells())
    throw InputError("loglik: cell table does not match the predictor map");
  double ll = 0.0;
  for (int c = 0; c < map.n_cells(); ++c) {
    const Cell& cell = cells.cells[c];
    if (!cell.observed) {
      if (d1) (*d1)[c] = 0.0;
      if (d2) (*d2)[c] = 0.0;
      continue;
    }
    const double eta = linear_predictor(map, latent, c);
    const BetabinomDerivs d = betabinom_eta_derivs(cell.y, cell.n, eta, rho);
    ll += d.logpmf;
    if (d1) (*d1)[c] = d.d_eta;
    if (d2) (*d2)[c] = d.d2_eta;
  }
  if (loglik) *loglik = ll;
}

}  // namespace spmrp
