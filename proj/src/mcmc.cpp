#include "spmrp/mcmc.hpp"

#include <algorithm>
#include <cmath>

#include "spmrp/errors.hpp"
#include "spmrp/rng.hpp"

namespace spmrp {

namespace {

// Orthogonal projection of a block proposal onto the block's constraint
// subspace. All constraints here are indicator vectors over disjoint
// supports, so projecting one at a time is exact.
struct BlockProjector {
  std::vector<std::vector<int>> groups;  // latent indices per constraint

  void project(Eigen::VectorXd& delta, int offset) const {
    for (const auto& g : groups) {
      double mean = 0.0;
      for (int ix : g) mean += delta[ix - offset];
      mean /= static_cast<double>(g.size());
      for (int ix : g) delta[ix - offset] -= mean;
    }
  }
};

struct AdaptiveScale {
  double log_step;
  long proposed = 0, accepted = 0;
  long total_proposed = 0, total_accepted = 0;

  explicit AdaptiveScale(double init) : log_step(std::log(init)) {}
  double step() const { return std::exp(log_step); }
  void adapt(double target) {
    if (proposed < 50) return;
    const double rate = static_cast<double>(accepted) / static_cast<double>(proposed);
    log_step += 0.5 * (rate - target);
    log_step = std::min(3.0, std::max(-9.0, log_step));
    proposed = accepted = 0;
  }
  double rate() const {
    return total_proposed ? static_cast<double>(total_accepted) / total_proposed : 0.0;
  }
};

double series_ess(const std::vector<double>& x) {
  const long n = static_cast<long>(x.size());
  if (n < 10) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  if (var <= 0.0) return static_cast<double>(n);
  double rho_sum = 0.0;
  for (long lag = 1; lag < n / 2; ++lag) {
    double acf = 0.0;
    for (long t = 0; t + lag < n; ++t) acf += (x[t] - mean) * (x[t + lag] - mean);
    acf /= (n - lag) * var;
    if (acf < 0.0) break;
    rho_sum += acf;
  }
  return static_cast<double>(n) / (1.0 + 2.0 * rho_sum);
}

}  // namespace

McmcResult mcmc_oracle(const LatentModel& model, const CellTable& cells, const McmcConfig& config,
                       std::uint64_t seed) {
  if (config.burn_in >= config.iterations)
    throw InputError("mcmc_oracle: burn_in must be below iterations");
  const int m = model.latent_dim;
  const int nh = model.n_hyper();
  RngStream rng(seed, "mcmc");

  // latent update blocks with their local constraint groups
  struct Block {
    int offset, size;
    BlockProjector proj;
    AdaptiveScale scale;
  };
  std::vector<Block> latent_blocks;
  for (const auto& b : model.blocks) {
    Block blk{b.offset, b.size, {}, AdaptiveScale(0.5 / std::sqrt(static_cast<double>(b.size)))};
    for (const auto& a : model.constraints) {
      std::vector<int> g;
      for (int i = b.offset; i < b.offset + b.size; ++i)
        if (a[i] != 0.0) g.push_back(i);
      if (!g.empty()) blk.proj.groups.push_back(std::move(g));
    }
    latent_blocks.push_back(std::move(blk));
  }
  std::vector<AdaptiveScale> hyper_scales(nh, AdaptiveScale(0.3));

  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd psi = model.psi_start();

  double loglik = total_loglik(cells, model.map, x, model.rho_of(psi));
  double logprior = model.prior_logdensity(x, psi);
  double hyper_lp = model.hyper_logprior(psi);

  const long kept_target = (config.iterations - config.burn_in) / config.thin;
  ThetaDraws draws;
  draws.S = static_cast<int>(kept_target);
  draws.seed = seed;
  draws.theta.resize(kept_target, model.map.n_cells());
  draws.rho.resize(kept_target);
  long kept = 0;

  for (long it = 0; it < config.iterations; ++it) {
    const bool adapting = it < config.burn_in;
    for (auto& blk : latent_blocks) {
      Eigen::VectorXd delta(blk.size);
      for (int i = 0; i < blk.size; ++i) delta[i] = blk.scale.step() * rng.normal();
      blk.proj.project(delta, blk.offset);
      Eigen::VectorXd x_new = x;
      x_new.segment(blk.offset, blk.size) += delta;
      const double loglik_new = total_loglik(cells, model.map, x_new, model.rho_of(psi));
      const double logprior_new = model.prior_logdensity(x_new, psi);
      ++blk.scale.proposed;
      ++blk.scale.total_proposed;
      if (std::log(rng.uniform()) < loglik_new - loglik + logprior_new - logprior) {
        x = std::move(x_new);
        loglik = loglik_new;
        logprior = logprior_new;
        ++blk.scale.accepted;
        ++blk.scale.total_accepted;
      }
      if (adapting) blk.scale.adapt(config.target_accept);
    }
    for (int h = 0; h < nh; ++h) {
      Eigen::VectorXd psi_new = psi;
      psi_new[h] += hyper_scales[h].step() * rng.normal();
      const bool touches_lik = model.hypers[h].kind == HyperEntry::Kind::LogitRho;
      const double loglik_new =
          touches_lik ? total_loglik(cells, model.map, x, model.rho_of(psi_new)) : loglik;
      const double logprior_new = model.prior_logdensity(x, psi_new);
      double hyper_new;
      try {
        hyper_new = model.hyper_logprior(psi_new);
      } catch (const InputError&) {
        continue;  // proposal outside the prior domain
      }
      ++hyper_scales[h].proposed;
      ++hyper_scales[h].total_proposed;
      const double delta = (loglik_new - loglik) + (logprior_new - logprior) +
                           (hyper_new - hyper_lp);
      if (std::isfinite(delta) && std::log(rng.uniform()) < delta) {
        psi = std::move(psi_new);
        loglik = loglik_new;
        logprior = logprior_new;
        hyper_lp = hyper_new;
        ++hyper_scales[h].accepted;
        ++hyper_scales[h].total_accepted;
      }
      if (adapting) hyper_scales[h].adapt(config.target_accept);
    }
    if (!adapting && (it - config.burn_in) % config.thin == 0 && kept < kept_target) {
      for (int c = 0; c < model.map.n_cells(); ++c)
        draws.theta(kept, c) = expit_clamped(linear_predictor(model.map, x, c));
      draws.rho[kept] = model.rho_of(psi);
      ++kept;
    }
  }
  draws.S = static_cast<int>(kept);
  draws.theta.conservativeResize(kept, Eigen::NoChange);
  draws.rho.conservativeResize(kept);

  McmcResult out;
  out.draws = std::move(draws);
  for (std::size_t b = 0; b < latent_blocks.size(); ++b) {
    out.diagnostics.block_names.push_back(model.blocks[b].name);
    out.diagnostics.acceptance_rates.push_back(latent_blocks[b].scale.rate());
  }
  for (int h = 0; h < nh; ++h) {
    out.diagnostics.block_names.push_back(model.hypers[h].name);
    out.diagnostics.acceptance_rates.push_back(hyper_scales[h].rate());
  }
  out.diagnostics.kept_draws = kept;
  // ESS of the worst-mixing cell series among a deterministic subset
  double min_ess = static_cast<double>(kept);
  const int nc = model.map.n_cells();
  for (int c = 0; c < nc; c += std::max(1, nc / 8)) {
    std::vector<double> series(kept);
    for (long s = 0; s < kept; ++s) series[s] = out.draws.theta(s, c);
    min_ess = std::min(min_ess, series_ess(series));
  }
  out.diagnostics.min_theta_ess = min_ess;
  return out;
}

}  // namespace spmrp
