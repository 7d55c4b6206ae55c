#ifndef SPMRP_POSTSTRAT_HPP
#define SPMRP_POSTSTRAT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spmrp/inference.hpp"
#include "spmrp/ingest.hpp"

namespace spmrp {

struct GeoEstimate {
  std::string id;  // county FIPS or "state"
  double median = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  // state level only: the population-weighted proportion scale
  std::optional<double> prop_median, prop_lo95, prop_hi95;
};

struct CountEstimates {
  std::string level;  // "county" or "state"
  std::string sex;    // "F", "M", or "combined"
  int S = 0;
  std::uint64_t seed = 0;
  std::vector<GeoEstimate> rows;
  // row-major draws (S x rows), kept when requested so draw-wise operations
  // (sex combination, state sums) need no refit
  std::optional<Eigen::MatrixXd> draws;
};

struct PoststratWeights {
  Eigen::VectorXd w;                 // per cell, normalized within county
  std::vector<bool> zero_population; // per county flag
};

// w_ijk = N_ijk / N_i within each county; zero-population counties get
// all-zero weights and a flag.
PoststratWeights poststrat_weights(const PoststratTable& post, const StrataScheme& scheme,
                                   int sex);

CountEstimates county_counts(const ThetaDraws& draws, const PoststratTable& post,
                             const StrataScheme& scheme, int sex, bool retain_draws = true);

CountEstimates state_aggregate(const ThetaDraws& draws, const PoststratTable& post,
                               const StrataScheme& scheme, int sex, bool retain_draws = true);

// Draw-wise sum of two independently fitted models' estimates, paired by
// draw index.
CountEstimates combine_sexes(const CountEstimates& female, const CountEstimates& male);

GeoEstimate summarize_draws(const std::string& id, const Eigen::VectorXd& draws);

std::string estimates_to_csv(const CountEstimates& est);
CountEstimates estimates_from_csv_file(const std::string& path);

}  // namespace spmrp

#endif
