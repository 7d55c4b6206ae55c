#ifndef SPMRP_MCMC_HPP
#define SPMRP_MCMC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spmrp/inference.hpp"
#include "spmrp/model.hpp"

namespace spmrp {

struct McmcConfig {
  long iterations = 60000;
  long burn_in = 20000;
  int thin = 10;
  double target_accept = 0.3;  // inside the usual 0.23-0.44 band
};

struct McmcDiagnostics {
  std::vector<std::string> block_names;
  std::vector<double> acceptance_rates;  // post burn-in, latent blocks then hypers
  double min_theta_ess = 0.0;
  long kept_draws = 0;
};

struct McmcResult {
  ThetaDraws draws;
  McmcDiagnostics diagnostics;
};

// Adaptive random-walk Metropolis-within-Gibbs targeting the exact
// posterior; intended for small validation instances. Constraints are kept
// exact by projecting each block proposal onto the constraint subspace, and
// step sizes adapt during burn-in only.
McmcResult mcmc_oracle(const LatentModel& model, const CellTable& cells, const McmcConfig& config,
                       std::uint64_t seed);

}  // namespace spmrp

#endif
