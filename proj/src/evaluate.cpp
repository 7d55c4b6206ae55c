#include "spmrp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spmrp/errors.hpp"
#include "spmrp/gmrf.hpp"
#include "spmrp/model.hpp"
#include "spmrp/priors.hpp"
#include "spmrp/rng.hpp"
#include "spmrp/util.hpp"

namespace spmrp {

ComparisonReport coverage_report(const CountEstimates& est, const BaselineTable& baseline,
                                 const CountEstimates* state_est,
                                 std::optional<double> direct_state_count) {
  ComparisonReport rep;
  double sum_err = 0.0, sum_abs = 0.0;
  int covered = 0;
  for (const auto& row : est.rows) {
    const BaselineRow* b = baseline.find(row.id);
    if (!b) {
      rep.unmatched.push_back(row.id);
      continue;
    }
    CountyComparison c;
    c.county_id = row.id;
    c.median = row.median;
    c.lo95 = row.lo95;
    c.hi95 = row.hi95;
    c.baseline = b->doses;
    c.excluded = b->doses == 0 && b->population > 0;
    c.covered = static_cast<double>(b->doses) >= row.lo95 &&
                static_cast<double>(b->doses) <= row.hi95;
    c.error = row.median - static_cast<double>(b->doses);
    c.abs_rel_error = b->doses > 0 ? std::abs(c.error) / static_cast<double>(b->doses) : 0.0;
    rep.counties.push_back(c);
    if (c.excluded) {
      ++rep.excluded;
      continue;
    }
    ++rep.included;
    sum_err += c.error;
    sum_abs += std::abs(c.error);
    covered += c.covered ? 1 : 0;
  }
  if (rep.included > 0) {
    rep.mean_error = sum_err / rep.included;
    rep.mean_abs_error = sum_abs / rep.included;
    rep.coverage_rate = static_cast<double>(covered) / rep.included;
  }
  if (state_est && !state_est->rows.empty()) {
    std::int64_t state_total = 0;
    for (const auto& r : baseline.rows) state_total += r.doses;
    const auto& s = state_est->rows.front();
    rep.state_covered_vs_baseline =
        static_cast<double>(state_total) >= s.lo95 && static_cast<double>(state_total) <= s.hi95;
    if (direct_state_count)
      rep.state_covered_vs_direct = *direct_state_count >= s.lo95 && *direct_state_count <= s.hi95;
  }
  return rep;
}

std::string report_to_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "county_id,median,lo95,hi95,baseline,covered,excluded,error,abs_rel_error\n";
  for (const auto& c : report.counties)
    out << c.county_id << ',' << format_double(c.median) << ',' << format_double(c.lo95) << ','
        << format_double(c.hi95) << ',' << c.baseline << ',' << (c.covered ? 1 : 0) << ','
        << (c.excluded ? 1 : 0) << ',' << format_double(c.error) << ','
        << format_double(c.abs_rel_error) << '\n';
  return out.str();
}

std::string report_to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["included_counties"] = report.included;
  j["excluded_counties"] = report.excluded;
  j["coverage_rate"] = report.coverage_rate;
  j["mean_error"] = report.mean_error;
  j["mean_abs_error"] = report.mean_abs_error;
  j["unmatched"] = report.unmatched;
  if (report.state_covered_vs_baseline)
    j["state_covered_vs_baseline"] = *report.state_covered_vs_baseline;
  if (report.state_covered_vs_direct)
    j["state_covered_vs_direct"] = *report.state_covered_vs_direct;
  return j.dump(2) + "\n";
}

std::vector<RankedModel> rank_models(std::vector<RankedModel> entries, int K) {
  if (entries.empty()) throw InputError("rank_models: empty input");
  const auto complexity = [&](const std::string& name) {
    return ModelSpec::by_name(name).complexity(K);
  };
  std::stable_sort(entries.begin(), entries.end(), [&](const RankedModel& a, const RankedModel& b) {
    if (a.lcpo != b.lcpo) return a.lcpo < b.lcpo;
    const int ca = complexity(a.name), cb = complexity(b.name);
    if (ca != cb) return ca < cb;
    return a.name < b.name;
  });
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = static_cast<int>(i) + 1;
  return entries;
}

void TruthSpec::validate() const {
  scheme.validate();
  if (static_cast<int>(lambda.size()) != scheme.J())
    throw InputError("truth: lambda must have one entry per age level");
  if (static_cast<int>(beta.size()) != scheme.K())
    throw InputError("truth: beta must have one entry per education level");
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("truth: rho must lie in (0,1)");
  if (!(county_phi >= 0.0 && county_phi <= 1.0)) throw InputError("truth: phi must lie in [0,1]");
  if (county_sigma < 0.0) throw InputError("truth: sigma must be nonnegative");
  if (county_effects && static_cast<int>(county_effects->size()) != scheme.I())
    throw InputError("truth: county_effects must have one entry per county");
  if (cell_n_table && static_cast<int>(cell_n_table->size()) != scheme.n_cells())
    throw InputError("truth: cell_n_table must have one entry per cell");
  if (cell_n < 0 || cell_population < 0) throw InputError("truth: counts must be nonnegative");
}

namespace {

// Exact constrained intrinsic draw via the spectral factorization; kept
// independent of the kriging path used by the inference engine.
Eigen::VectorXd draw_structured(const ScaledStructure& st, RngStream& rng) {
  const Eigen::MatrixXd Q = st.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  if (es.info() != Eigen::Success) throw NumericError("simulate: eigendecomposition failed");
  const int n = static_cast<int>(Q.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev < 1e-9) continue;  // null directions stay at zero
    x += (rng.normal() / std::sqrt(ev)) * es.eigenvectors().col(i);
  }
  return x;
}

long sample_betabinom(long n, double theta, double rho, RngStream& rng) {
  if (n == 0) return 0;
  const double c = (1.0 - rho) / rho;
  if (c > 1e8) return rng.binomial(n, theta);
  const double p = rng.beta(theta * c, (1.0 - theta) * c);
  return rng.binomial(n, std::min(1.0 - 1e-12, std::max(1e-12, p)));
}

}  // namespace

SimulatedData simulate_dataset(const TruthSpec& truth, std::uint64_t seed) {
  truth.validate();
  const StrataScheme& sc = truth.scheme;
  SimulatedData out;
  out.graph = truth.graph;

  RngStream field_rng(seed, "sim_field");
  Eigen::VectorXd county(sc.I());
  if (truth.county_effects) {
    for (int i = 0; i < sc.I(); ++i) county[i] = (*truth.county_effects)[i];
  } else if (truth.county_phi > 0.0) {
    const ScaledStructure st = scale_structure(icar_precision(truth.graph));
    const Eigen::VectorXd u_star = draw_structured(st, field_rng);
    Eigen::VectorXd v(sc.I());
    for (int i = 0; i < sc.I(); ++i) v[i] = field_rng.normal();
    county = bym2_effect(v, u_star, truth.county_sigma, truth.county_phi);
  } else {
    for (int i = 0; i < sc.I(); ++i) county[i] = truth.county_sigma * field_rng.normal();
  }
  out.county_effect = county;

  const auto theta_of = [&](int i, int j, int k, double shift) {
    const double eta = truth.alpha + truth.lambda[j] + truth.beta[k] + county[i] + shift;
    return expit_clamped(eta);
  };

  out.theta_f.resize(sc.n_cells());
  out.theta_m.resize(sc.n_cells());
  out.cells_f.sex = sc.sexes[0];
  out.cells_m.sex = sc.sexes[1];
  out.cells_f.cells.assign(sc.n_cells(), Cell{});
  out.cells_m.cells.assign(sc.n_cells(), Cell{});
  out.post.n_sexes = 2;
  out.post.counts.assign(static_cast<std::size_t>(sc.n_cells()) * 2, truth.cell_population);
  out.post.rows_per_sex.assign(2, static_cast<std::size_t>(sc.n_cells()));

  RngStream y_rng(seed, "sim_counts");
  out.true_county_counts_f.assign(sc.I(), 0.0);
  out.true_county_counts_m.assign(sc.I(), 0.0);
  out.true_county_counts_combined.assign(sc.I(), 0.0);
  for (int i = 0; i < sc.I(); ++i)
    for (int j = 0; j < sc.J(); ++j)
      for (int k = 0; k < sc.K(); ++k) {
        const int c = sc.cell_index(i, j, k);
        const long n = truth.cell_n_table ? (*truth.cell_n_table)[c] : truth.cell_n;
        const double tf = theta_of(i, j, k, 0.0);
        const double tm = theta_of(i, j, k, truth.sex_shift);
        out.theta_f[c] = tf;
        out.theta_m[c] = tm;
        out.cells_f.cells[c] = Cell{n, sample_betabinom(n, tf, truth.rho, y_rng), n > 0};
        out.cells_m.cells[c] = Cell{n, sample_betabinom(n, tm, truth.rho, y_rng), n > 0};
        const double N = static_cast<double>(truth.cell_population);
        out.true_county_counts_f[i] += N * tf;
        out.true_county_counts_m[i] += N * tm;
      }
  for (int i = 0; i < sc.I(); ++i)
    out.true_county_counts_combined[i] =
        out.true_county_counts_f[i] + out.true_county_counts_m[i];

  // derived totals
  out.post.county_totals.assign(static_cast<std::size_t>(sc.I()) * 2, 0);
  out.post.state_total.assign(2, 0);
  for (int i = 0; i < sc.I(); ++i)
    for (int j = 0; j < sc.J(); ++j)
      for (int k = 0; k < sc.K(); ++k)
        for (int sx = 0; sx < 2; ++sx) {
          out.post.county_totals[i * 2 + sx] += truth.cell_population;
          out.post.state_total[sx] += truth.cell_population;
        }
  return out;
}

LatticeInstance make_lattice(int rows, int cols, int J, int K) {
  if (rows < 1 || cols < 1) throw InputError("make_lattice: need positive dimensions");
  LatticeInstance out;
  std::vector<std::string> fips;
  for (int i = 0; i < rows * cols; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "9%04d", i + 1);
    fips.emplace_back(buf);
  }
  StrataScheme sc;
  sc.county_ids = fips;
  for (int j = 0; j < J; ++j) sc.age_levels.push_back("age" + std::to_string(j + 1));
  for (int k = 0; k < K; ++k) sc.edu_levels.push_back("edu" + std::to_string(k + 1));
  sc.sexes = {"F", "M"};
  sc.validate();

  std::ostringstream edges;
  edges << "fips_a,fips_b\n";
  const auto id = [&](int r, int c) { return fips[r * cols + c]; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges << id(r, c) << ',' << id(r, c + 1) << '\n';
      if (r + 1 < rows) edges << id(r, c) << ',' << id(r + 1, c) << '\n';
    }
  std::istringstream in(edges.str());
  out.graph = parse_adjacency(in, sc);
  out.scheme = std::move(sc);
  return out;
}

}  // namespace spmrp
