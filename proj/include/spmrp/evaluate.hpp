#ifndef SPMRP_EVALUATE_HPP
#define SPMRP_EVALUATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spmrp/ingest.hpp"
#include "spmrp/poststrat.hpp"

namespace spmrp {

struct CountyComparison {
  std::string county_id;
  double median = 0.0, lo95 = 0.0, hi95 = 0.0;
  std::int64_t baseline = 0;
  bool covered = false;
  bool excluded = false;  // zero reported doses with population present
  double error = 0.0;     // median - baseline
  double abs_rel_error = 0.0;
};

struct ComparisonReport {
  std::vector<CountyComparison> counties;
  std::vector<std::string> unmatched;  // estimate ids without a baseline row
  double mean_error = 0.0;      // signed, over included counties
  double mean_abs_error = 0.0;
  double coverage_rate = 0.0;
  int included = 0;
  int excluded = 0;
  // state level, when a state estimate is supplied
  std::optional<bool> state_covered_vs_baseline;
  std::optional<bool> state_covered_vs_direct;
};

ComparisonReport coverage_report(const CountEstimates& est, const BaselineTable& baseline,
                                 const CountEstimates* state_est = nullptr,
                                 std::optional<double> direct_state_count = std::nullopt);

std::string report_to_csv(const ComparisonReport& report);
std::string report_to_json(const ComparisonReport& report);

struct RankedModel {
  std::string name;
  std::string sex;
  double lcpo = 0.0;
  int rank = 0;
};

// Ascending LCPO (lower is better); ties broken by model simplicity
// (fewer hyperparameters first), then by name.
std::vector<RankedModel> rank_models(std::vector<RankedModel> entries, int K = 6);

// Generative truth for recovery studies: fixed latent values, spatial field
// parameters, cell sample sizes and census counts.
struct TruthSpec {
  StrataScheme scheme;
  AdjacencyGraph graph;
  double alpha = 0.0;
  std::vector<double> lambda;  // J entries
  std::vector<double> beta;    // K entries
  double county_sigma = 0.5;
  double county_phi = 0.5;
  std::optional<std::vector<double>> county_effects;  // overrides the BYM2 draw
  double sex_shift = 0.0;  // added to the male linear predictor
  double rho = 0.05;
  long cell_n = 200;        // survey trials per cell (0 = unobserved)
  std::optional<std::vector<long>> cell_n_table;  // per cell override
  long cell_population = 1000;  // census count per (cell, sex)

  void validate() const;
};

struct SimulatedData {
  CellTable cells_f;
  CellTable cells_m;
  PoststratTable post;
  AdjacencyGraph graph;
  Eigen::VectorXd theta_f;  // true cell probabilities
  Eigen::VectorXd theta_m;
  Eigen::VectorXd county_effect;  // realized spatial+iid field
  std::vector<double> true_county_counts_f;  // sum_jk N_ijk theta_ijk
  std::vector<double> true_county_counts_m;
  std::vector<double> true_county_counts_combined;
};

SimulatedData simulate_dataset(const TruthSpec& truth, std::uint64_t seed);

// R x C rook-adjacency lattice with synthetic FIPS ids and J/K generic
// levels; the workhorse scheme for simulation studies.
struct LatticeInstance {
  StrataScheme scheme;
  AdjacencyGraph graph;
};
LatticeInstance make_lattice(int rows, int cols, int J, int K);

}  // namespace spmrp

#endif
