#include "spmrp/poststrat.hpp"

#include <algorithm>
#include <sstream>

#include "spmrp/csv.hpp"
#include "spmrp/errors.hpp"
#include "spmrp/util.hpp"

namespace spmrp {

GeoEstimate summarize_draws(const std::string& id, const Eigen::VectorXd& draws) {
  std::vector<double> v(draws.data(), draws.data() + draws.size());
  std::sort(v.begin(), v.end());
  GeoEstimate e;
  e.id = id;
  e.median = quantile_sorted(v, 0.5);
  e.lo95 = quantile_sorted(v, 0.025);
  e.hi95 = quantile_sorted(v, 0.975);
  return e;
}

PoststratWeights poststrat_weights(const PoststratTable& post, const StrataScheme& scheme,
                                   int sex) {
  PoststratWeights out;
  out.w = Eigen::VectorXd::Zero(scheme.n_cells());
  out.zero_population.assign(scheme.I(), false);
  for (int i = 0; i < scheme.I(); ++i) {
    const double total = static_cast<double>(post.county_total(i, sex));
    if (total <= 0.0) {
      out.zero_population[i] = true;
      continue;
    }
    for (int j = 0; j < scheme.J(); ++j)
      for (int k = 0; k < scheme.K(); ++k)
        out.w[scheme.cell_index(i, j, k)] =
            static_cast<double>(post.count(scheme, i, j, k, sex)) / total;
  }
  return out;
}

namespace {

// y_i^(s) = sum_jk N_ijk * theta_ijk^(s)
Eigen::MatrixXd county_draw_matrix(const ThetaDraws& draws, const PoststratTable& post,
                                   const StrataScheme& scheme, int sex) {
  if (draws.theta.cols() != scheme.n_cells())
    throw InputError("county_counts: draw layout does not match the scheme");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(draws.S, scheme.I());
  for (int i = 0; i < scheme.I(); ++i)
    for (int j = 0; j < scheme.J(); ++j)
      for (int k = 0; k < scheme.K(); ++k) {
        const double N = static_cast<double>(post.count(scheme, i, j, k, sex));
        if (N == 0.0) continue;
        out.col(i) += N * draws.theta.col(scheme.cell_index(i, j, k));
      }
  return out;
}

}  // namespace

CountEstimates county_counts(const ThetaDraws& draws, const PoststratTable& post,
                             const StrataScheme& scheme, int sex, bool retain_draws) {
  const Eigen::MatrixXd by_county = county_draw_matrix(draws, post, scheme, sex);
  CountEstimates est;
  est.level = "county";
  est.sex = scheme.sexes[sex];
  est.S = draws.S;
  est.seed = draws.seed;
  for (int i = 0; i < scheme.I(); ++i)
    est.rows.push_back(summarize_draws(scheme.county_ids[i], by_county.col(i)));
  if (retain_draws) est.draws = by_county;
  return est;
}

CountEstimates state_aggregate(const ThetaDraws& draws, const PoststratTable& post,
                               const StrataScheme& scheme, int sex, bool retain_draws) {
  const Eigen::MatrixXd by_county = county_draw_matrix(draws, post, scheme, sex);
  const Eigen::VectorXd state = by_county.rowwise().sum();
  CountEstimates est;
  est.level = "state";
  est.sex = scheme.sexes[sex];
  est.S = draws.S;
  est.seed = draws.seed;
  GeoEstimate row = summarize_draws("state", state);
  const double N = static_cast<double>(post.state_total[sex]);
  if (N > 0.0) {
    const GeoEstimate prop = summarize_draws("state", state / N);
    row.prop_median = prop.median;
    row.prop_lo95 = prop.lo95;
    row.prop_hi95 = prop.hi95;
  }
  est.rows.push_back(row);
  if (retain_draws) est.draws = state;
  return est;
}

CountEstimates combine_sexes(const CountEstimates& female, const CountEstimates& male) {
  if (!female.draws || !male.draws)
    throw InputError("combine_sexes: draw-level outputs were not retained");
  if (female.S != male.S)
    throw InputError("combine_sexes: draw count mismatch (" + std::to_string(female.S) + " vs " +
                     std::to_string(male.S) + ")");
  if (female.level != male.level || female.rows.size() != male.rows.size())
    throw InputError("combine_sexes: geography mismatch");
  CountEstimates est;
  est.level = female.level;
  est.sex = "combined";
  est.S = female.S;
  est.seed = female.seed;
  const Eigen::MatrixXd sum = *female.draws + *male.draws;
  for (std::size_t r = 0; r < female.rows.size(); ++r) {
    if (female.rows[r].id != male.rows[r].id)
      throw InputError("combine_sexes: geography id mismatch at row " + std::to_string(r));
    est.rows.push_back(summarize_draws(female.rows[r].id, sum.col(static_cast<int>(r))));
  }
  est.draws = sum;
  return est;
}

std::string estimates_to_csv(const CountEstimates& est) {
  std::ostringstream out;
  out << "level,id,sex,median,lo95,hi95,S,seed\n";
  for (const auto& r : est.rows)
    out << est.level << ',' << r.id << ',' << est.sex << ',' << format_double(r.median) << ','
        << format_double(r.lo95) << ',' << format_double(r.hi95) << ',' << est.S << ','
        << est.seed << '\n';
  return out.str();
}

CountEstimates estimates_from_csv_file(const std::string& path) {
  const CsvTable csv = CsvTable::read_file(path);
  CountEstimates est;
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    if (r == 0) {
      est.level = csv.cell(r, "level");
      est.sex = csv.cell(r, "sex");
      est.S = static_cast<int>(csv.long_cell(r, "S"));
      est.seed = std::stoull(csv.cell(r, "seed"));
    }
    GeoEstimate g;
    g.id = csv.cell(r, "id");
    g.median = csv.double_cell(r, "median");
    g.lo95 = csv.double_cell(r, "lo95");
    g.hi95 = csv.double_cell(r, "hi95");
    est.rows.push_back(g);
  }
  return est;
}

}  // namespace spmrp
