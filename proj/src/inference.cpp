#include "spmrp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "spmrp/csv.hpp"
#include "spmrp/errors.hpp"
#include "spmrp/rng.hpp"
#include "spmrp/util.hpp"

namespace spmrp {

namespace {

double log_det_of_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  double s = 0.0;
  const auto& L = llt.matrixLLT();
  for (int i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
  return 2.0 * s;
}

// LLT with escalating Levenberg ridge; used off-mode where the
// beta-binomial curvature can dip negative.
Eigen::LLT<Eigen::MatrixXd> robust_llt(Eigen::MatrixXd H, bool* ridged) {
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() == Eigen::Success) return llt;
  const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  double ridge = 1e-10 * scale;
  for (int t = 0; t < 18; ++t) {
    Eigen::MatrixXd Hr = H + ridge * Eigen::MatrixXd::Identity(H.rows(), H.cols());
    llt.compute(Hr);
    if (llt.info() == Eigen::Success) {
      if (ridged) *ridged = true;
      return llt;
    }
    ridge *= 10.0;
  }
  throw NumericError("factorization failed even with ridge");
}

struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  bool ridged = false;
};

// Maximizes loglik(x) - x' Q_p x / 2 with step-halving; the objective never
// decreases across accepted steps.
NewtonResult newton_mode(const LatentModel& model, const CellTable& cells,
                         const Eigen::MatrixXd& Qp, double rho, const FitConfig& config,
                         const Eigen::VectorXd* warm) {
  const int m = model.latent_dim;
  NewtonResult res;
  res.x = warm && warm->size() == m ? *warm : Eigen::VectorXd::Zero(m);

  const auto objective = [&](const Eigen::VectorXd& x) {
    return total_loglik(cells, model.map, x, rho) - 0.5 * x.dot(Qp * x);
  };

  Eigen::VectorXd d1(model.map.n_cells()), d2(model.map.n_cells());
  double g = objective(res.x);
  for (res.iterations = 0; res.iterations < config.newton_max_iter; ++res.iterations) {
    loglik_eta_derivs(cells, model.map, res.x, rho, nullptr, &d1, &d2);
    Eigen::VectorXd grad = -(Qp * res.x);
    for (int c = 0; c < model.map.n_cells(); ++c) {
      const auto& terms = model.map.cells[c];
      for (int t = 0; t < terms.count; ++t) grad[terms.idx[t]] += d1[c];
    }
    if (grad.lpNorm<Eigen::Infinity>() < config.newton_tol) {
      res.converged = true;
      return res;
    }
    Eigen::MatrixXd H = Qp;
    for (int c = 0; c < model.map.n_cells(); ++c) {
      const auto& terms = model.map.cells[c];
      const double w = -d2[c];
      for (int a = 0; a < terms.count; ++a)
        for (int b = 0; b < terms.count; ++b) H(terms.idx[a], terms.idx[b]) += w;
    }
    const auto llt = robust_llt(std::move(H), &res.ridged);
    const Eigen::VectorXd step = llt.solve(grad);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      const Eigen::VectorXd x_new = res.x + t * step;
      const double g_new = objective(x_new);
      if (std::isfinite(g_new) && g_new >= g) {
        res.x = x_new;
        g = g_new;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.converged = grad.lpNorm<Eigen::Infinity>() < 1e-5;
      return res;
    }
  }
  // final gradient check
  loglik_eta_derivs(cells, model.map, res.x, rho, nullptr, &d1, nullptr);
  Eigen::VectorXd grad = -(Qp * res.x);
  for (int c = 0; c < model.map.n_cells(); ++c) {
    const auto& terms = model.map.cells[c];
    for (int t = 0; t < terms.count; ++t) grad[terms.idx[t]] += d1[c];
  }
  res.converged = grad.lpNorm<Eigen::Infinity>() < 1e-5;
  return res;
}

// Posterior-precision pieces reused by the marginal, the kriging
// correction, and sampling.
struct Conditional {
  Eigen::LLT<Eigen::MatrixXd> llt;  // of Q_c
  double logdet_Qc = 0.0;
  Eigen::MatrixXd At;       // latent_dim x k
  Eigen::MatrixXd QinvAt;   // latent_dim x k
  Eigen::LLT<Eigen::MatrixXd> S_llt;
  double logdet_S = 0.0;
  bool has_constraints = false;
  bool ridged = false;

  Eigen::VectorXd apply_kriging(const Eigen::VectorXd& x) const {
    if (!has_constraints) return x;
    const Eigen::VectorXd Ax = At.transpose() * x;
    return x - QinvAt * S_llt.solve(Ax);
  }
};

Conditional make_conditional(const LatentModel& model, const Eigen::MatrixXd& Qp,
                             const Eigen::VectorXd& curvature) {
  Conditional cond;
  Eigen::MatrixXd Qc = Qp;
  for (int c = 0; c < model.map.n_cells(); ++c) {
    const auto& terms = model.map.cells[c];
    const double w = curvature[c];
    for (int a = 0; a < terms.count; ++a)
      for (int b = 0; b < terms.count; ++b) Qc(terms.idx[a], terms.idx[b]) += w;
  }
  cond.llt = robust_llt(std::move(Qc), &cond.ridged);
  cond.logdet_Qc = log_det_of_llt(cond.llt);
  const int k = static_cast<int>(model.constraints.size());
  cond.has_constraints = k > 0;
  if (k > 0) {
    cond.At.resize(model.latent_dim, k);
    for (int c = 0; c < k; ++c) cond.At.col(c) = model.constraints[c];
    cond.QinvAt = cond.llt.solve(cond.At);
    Eigen::MatrixXd S = cond.At.transpose() * cond.QinvAt;
    cond.S_llt.compute(S);
    if (cond.S_llt.info() != Eigen::Success)
      throw NumericError("constraint system A Q^-1 A' is singular");
    cond.logdet_S = log_det_of_llt(cond.S_llt);
  }
  return cond;
}

}  // namespace

double latent_logpost(const LatentModel& model, const CellTable& cells, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& psi) {
  const Eigen::MatrixXd Qp = model.prior_precision(psi);
  return total_loglik(cells, model.map, x, model.rho_of(psi)) - 0.5 * x.dot(Qp * x);
}

Eigen::VectorXd latent_logpost_gradient(const LatentModel& model, const CellTable& cells,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& psi) {
  const Eigen::MatrixXd Qp = model.prior_precision(psi);
  return total_loglik_gradient(cells, model.map, x, model.rho_of(psi)) - Qp * x;
}

Eigen::MatrixXd latent_logpost_hessian(const LatentModel& model, const CellTable& cells,
                                       const Eigen::VectorXd& x, const Eigen::VectorXd& psi) {
  Eigen::MatrixXd H = -model.prior_precision(psi);
  Eigen::VectorXd d2(model.map.n_cells());
  loglik_eta_derivs(cells, model.map, x, model.rho_of(psi), nullptr, nullptr, &d2);
  for (int c = 0; c < model.map.n_cells(); ++c) {
    const auto& terms = model.map.cells[c];
    for (int a = 0; a < terms.count; ++a)
      for (int b = 0; b < terms.count; ++b) H(terms.idx[a], terms.idx[b]) += d2[c];
  }
  return H;
}

LaplaceSummary laplace_at(const LatentModel& model, const CellTable& cells,
                          const Eigen::VectorXd& psi, const FitConfig& config,
                          const Eigen::VectorXd* warm_start) {
  if (psi.size() != model.n_hyper()) throw InputError("laplace_at: psi dimension mismatch");
  const Eigen::MatrixXd Qp = model.prior_precision(psi);
  const double rho = model.rho_of(psi);
  const NewtonResult nr = newton_mode(model, cells, Qp, rho, config, warm_start);
  LaplaceSummary out;
  out.mode = nr.x;
  out.iterations = nr.iterations;
  out.converged = nr.converged;
  out.ridged = nr.ridged;

  Eigen::VectorXd d2(model.map.n_cells());
  loglik_eta_derivs(cells, model.map, nr.x, rho, nullptr, nullptr, &d2);
  out.curvature = -d2;

  Conditional cond = make_conditional(model, Qp, out.curvature);
  out.ridged = out.ridged || cond.ridged;
  out.mean_c = cond.apply_kriging(nr.x);
  out.log_marginal = total_loglik(cells, model.map, out.mean_c, rho) +
                     model.prior_logdensity(out.mean_c, psi) -
                     0.5 * (cond.logdet_Qc + cond.logdet_S);
  return out;
}

namespace {

// Nelder-Mead maximizer; deterministic given the start simplex.
struct NelderMead {
  int evaluations = 0;
  bool converged = false;

  Eigen::VectorXd maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& start, double initial_step, double tol,
                           int max_eval, double* best_value) {
    const int n = static_cast<int>(start.size());
    const auto neg = [&](const Eigen::VectorXd& x) {
      const double v = f(x);
      ++evaluations;
      return std::isfinite(v) ? -v : 1e300;
    };
    std::vector<Eigen::VectorXd> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i) pts[i + 1][i] += initial_step;
    for (int i = 0; i <= n; ++i) vals[i] = neg(pts[i]);

    auto order = [&]() {
      std::vector<int> idx(n + 1);
      for (int i = 0; i <= n; ++i) idx[i] = i;
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
      std::vector<Eigen::VectorXd> p2(n + 1);
      std::vector<double> v2(n + 1);
      for (int i = 0; i <= n; ++i) {
        p2[i] = pts[idx[i]];
        v2[i] = vals[idx[i]];
      }
      pts.swap(p2);
      vals.swap(v2);
    };

    while (evaluations < max_eval) {
      order();
      if (vals[n] - vals[0] < tol) {
        converged = true;
        break;
      }
      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) centroid += pts[i];
      centroid /= n;

      const Eigen::VectorXd xr = centroid + (centroid - pts[n]);
      const double fr = neg(xr);
      if (fr < vals[0]) {
        const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[n]);
        const double fe = neg(xe);
        if (fe < fr) {
          pts[n] = xe;
          vals[n] = fe;
        } else {
          pts[n] = xr;
          vals[n] = fr;
        }
      } else if (fr < vals[n - 1]) {
        pts[n] = xr;
        vals[n] = fr;
      } else {
        const bool outside = fr < vals[n];
        const Eigen::VectorXd xc =
            outside ? centroid + 0.5 * (xr - centroid) : centroid - 0.5 * (centroid - pts[n]);
        const double fc = neg(xc);
        if (fc < (outside ? fr : vals[n])) {
          pts[n] = xc;
          vals[n] = fc;
        } else {
          for (int i = 1; i <= n; ++i) {
            pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
            vals[i] = neg(pts[i]);
          }
        }
      }
    }
    order();
    if (best_value) *best_value = -vals[0];
    return pts[0];
  }
};

}  // namespace

PosteriorFit fit(const LatentModel& model, const CellTable& cells, const FitConfig& config) {
  const int nh = model.n_hyper();
  if (nh == 0) throw InputError("fit: model has no hyperparameters");

  // warm-started hyper log posterior
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(model.latent_dim);
  const auto eval_point = [&](const Eigen::VectorXd& psi, LaplaceSummary* out) {
    LaplaceSummary la = laplace_at(model, cells, psi, config, &warm);
    if (!la.converged) throw NumericError("inner Newton failed to converge");
    const double lp = la.log_marginal + model.hyper_logprior(psi);
    if (out) *out = la;
    return lp;
  };
  const auto safe_eval = [&](const Eigen::VectorXd& psi) {
    try {
      LaplaceSummary la;
      const double lp = eval_point(psi, &la);
      warm = la.mode;
      return lp;
    } catch (const NumericError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  PosteriorFit out;
  out.diagnostics.converged = false;

  Eigen::VectorXd psi_mode;
  double best = -std::numeric_limits<double>::infinity();
  int attempt = 0;
  for (; attempt <= config.retries; ++attempt) {
    Eigen::VectorXd start = model.psi_start();
    if (attempt > 0) {
      RngStream jit(0xfe15u, "fit_retry", static_cast<std::uint64_t>(attempt));
      for (int i = 0; i < nh; ++i) start[i] += jit.normal();
    }
    warm.setZero();
    NelderMead nm;
    double value = 0.0;
    Eigen::VectorXd cand = nm.maximize(safe_eval, start, 0.5, config.nm_tol, config.nm_max_eval,
                                       &value);
    out.diagnostics.nm_evaluations += nm.evaluations;
    if (nm.converged && std::isfinite(value)) {
      psi_mode = cand;
      best = value;
      out.diagnostics.converged = true;
      break;
    }
  }
  out.diagnostics.retries_used = attempt;
  if (!out.diagnostics.converged)
    throw NumericError("fit: hyperparameter optimization did not converge after " +
                       std::to_string(config.retries) + " retries (evaluations=" +
                       std::to_string(out.diagnostics.nm_evaluations) + ")");
  out.psi_mode = psi_mode;

  // curvature at the mode -> per-axis grid steps
  warm.setZero();
  {
    LaplaceSummary la;
    best = eval_point(psi_mode, &la);
    warm = la.mode;
  }
  const double h = config.hessian_step;
  Eigen::MatrixXd H(nh, nh);
  std::vector<Eigen::VectorXd> plus(nh, psi_mode), minus(nh, psi_mode);
  std::vector<double> fp(nh), fm(nh);
  for (int a = 0; a < nh; ++a) {
    plus[a][a] += h;
    minus[a][a] -= h;
    fp[a] = safe_eval(plus[a]);
    fm[a] = safe_eval(minus[a]);
    H(a, a) = (fp[a] - 2.0 * best + fm[a]) / (h * h);
  }
  for (int a = 0; a < nh; ++a)
    for (int b = a + 1; b < nh; ++b) {
      Eigen::VectorXd pp = psi_mode, pm = psi_mode, mp = psi_mode, mm = psi_mode;
      pp[a] += h; pp[b] += h;
      pm[a] += h; pm[b] -= h;
      mp[a] -= h; mp[b] += h;
      mm[a] -= h; mm[b] -= h;
      H(a, b) = H(b, a) =
          (safe_eval(pp) - safe_eval(pm) - safe_eval(mp) + safe_eval(mm)) / (4.0 * h * h);
    }
  out.psi_sd.resize(nh);
  Eigen::LLT<Eigen::MatrixXd> cov_llt(Eigen::MatrixXd(-H));
  if (cov_llt.info() == Eigen::Success) {
    const Eigen::MatrixXd cov = cov_llt.solve(Eigen::MatrixXd::Identity(nh, nh));
    for (int a = 0; a < nh; ++a) out.psi_sd[a] = std::sqrt(std::max(cov(a, a), 1e-6));
  } else {
    for (int a = 0; a < nh; ++a)
      out.psi_sd[a] = 1.0 / std::sqrt(std::max(-H(a, a), 0.04));
  }
  for (int a = 0; a < nh; ++a) out.psi_sd[a] = std::min(5.0, std::max(0.05, out.psi_sd[a]));
  out.diagnostics.psi_sd.assign(out.psi_sd.data(), out.psi_sd.data() + nh);

  // hyperparameter grid around the mode
  const auto psi_of = [&](const std::vector<int>& z) {
    Eigen::VectorXd psi = psi_mode;
    for (int a = 0; a < nh; ++a) psi[a] += z[a] * config.grid_step * out.psi_sd[a];
    return psi;
  };
  const auto add_point = [&](const std::vector<int>& z, double lp, const LaplaceSummary& la) {
    GridPoint gp;
    gp.psi = psi_of(z);
    gp.mode = la.mode;
    gp.mean_c = la.mean_c;
    gp.curvature = la.curvature;
    gp.log_post = lp;
    gp.newton_iterations = la.iterations;
    out.diagnostics.ridged = out.diagnostics.ridged || la.ridged;
    out.points.push_back(std::move(gp));
  };

  {
    LaplaceSummary la_mode;
    warm.setZero();
    const double lp0 = eval_point(psi_mode, &la_mode);
    best = lp0;
    add_point(std::vector<int>(nh, 0), lp0, la_mode);
    warm = la_mode.mode;

    if (nh < config.star_dim_threshold) {
      out.diagnostics.grid_design = "lattice";
      std::map<std::vector<int>, bool> visited;  // kept flag
      std::map<std::vector<int>, Eigen::VectorXd> modes;
      std::vector<int> zero(nh, 0);
      visited[zero] = true;
      modes[zero] = la_mode.mode;
      std::deque<std::vector<int>> frontier{zero};
      while (!frontier.empty() &&
             static_cast<int>(out.points.size()) < config.max_grid_points) {
        const std::vector<int> z = frontier.front();
        frontier.pop_front();
        for (int a = 0; a < nh && static_cast<int>(out.points.size()) < config.max_grid_points;
             ++a) {
          for (int dir : {+1, -1}) {
            std::vector<int> zn = z;
            zn[a] += dir;
            if (visited.count(zn)) continue;
            warm = modes[z];
            LaplaceSummary la;
            double lp;
            try {
              lp = eval_point(psi_of(zn), &la);
            } catch (const NumericError&) {
              visited[zn] = false;
              continue;
            }
            const bool keep = best - lp < config.log_drop;
            visited[zn] = keep;
            if (keep) {
              modes[zn] = la.mode;
              add_point(zn, lp, la);
              frontier.push_back(zn);
            }
          }
        }
      }
      out.diagnostics.grid_capped =
          static_cast<int>(out.points.size()) >= config.max_grid_points;
    } else {
      out.diagnostics.grid_design = "star";
      for (int a = 0; a < nh; ++a) {
        for (int dir : {+1, -1}) {
          warm = la_mode.mode;
          for (int t = 1; t <= 6; ++t) {
            std::vector<int> z(nh, 0);
            z[a] = dir * t;
            LaplaceSummary la;
            double lp;
            try {
              lp = eval_point(psi_of(z), &la);
            } catch (const NumericError&) {
              break;
            }
            if (best - lp >= config.log_drop) break;
            add_point(z, lp, la);
            warm = la.mode;
          }
        }
      }
    }
  }

  double max_lp = -std::numeric_limits<double>::infinity();
  for (const auto& p : out.points) max_lp = std::max(max_lp, p.log_post);
  double wsum = 0.0;
  for (auto& p : out.points) {
    p.weight = std::exp(p.log_post - max_lp);
    wsum += p.weight;
  }
  for (auto& p : out.points) p.weight /= wsum;
  out.diagnostics.grid_points = static_cast<int>(out.points.size());
  return out;
}

namespace {

struct DrawPlan {
  std::vector<int> point_of_draw;
  std::vector<std::vector<int>> draws_of_point;
};

DrawPlan plan_draws(const PosteriorFit& fit, int S, std::uint64_t seed) {
  const int G = static_cast<int>(fit.points.size());
  std::vector<double> cum(G);
  double acc = 0.0;
  for (int g = 0; g < G; ++g) {
    acc += fit.points[g].weight;
    cum[g] = acc;
  }
  cum[G - 1] = 1.0;
  DrawPlan plan;
  plan.point_of_draw.resize(S);
  plan.draws_of_point.resize(G);
  for (int s = 0; s < S; ++s) {
    RngStream st(seed, "theta_point", static_cast<std::uint64_t>(s));
    const int g = st.pick(cum.data(), G);
    plan.point_of_draw[s] = g;
    plan.draws_of_point[g].push_back(s);
  }
  return plan;
}

// Latent draws grouped by grid point; each group factors its Gaussian once.
// Per-draw counter streams keep the output independent of the grouping and
// of the worker count.
void sample_latent_impl(const PosteriorFit& fit, const LatentModel& model, int S,
                        std::uint64_t seed, Eigen::MatrixXd* latent, Eigen::VectorXd* rho_out) {
  if (S < 1) throw InputError("sample: need S >= 1");
  if (fit.points.empty()) throw InputError("sample: empty posterior fit");
  const int m = model.latent_dim;
  const DrawPlan plan = plan_draws(fit, S, seed);
  latent->resize(S, m);
  if (rho_out) rho_out->resize(S);

  const int G = static_cast<int>(fit.points.size());
  std::vector<int> active;
  for (int g = 0; g < G; ++g)
    if (!plan.draws_of_point[g].empty()) active.push_back(g);

  parallel_for(static_cast<int>(active.size()), default_workers(), [&](int ai) {
    const int g = active[ai];
    const GridPoint& gp = fit.points[g];
    const Eigen::MatrixXd Qp = model.prior_precision(gp.psi);
    const double rho = model.rho_of(gp.psi);
    const Conditional cond = make_conditional(model, Qp, gp.curvature);
    Eigen::VectorXd z(m);
    for (int s : plan.draws_of_point[g]) {
      RngStream st(seed, "theta_latent", static_cast<std::uint64_t>(s));
      for (int i = 0; i < m; ++i) z[i] = st.normal();
      Eigen::VectorXd x = gp.mode + cond.llt.matrixU().solve(z);
      x = cond.apply_kriging(x);
      latent->row(s) = x.transpose();
      if (rho_out) (*rho_out)[s] = rho;
    }
  });
}

}  // namespace

Eigen::MatrixXd sample_latent(const PosteriorFit& fit, const LatentModel& model, int S,
                              std::uint64_t seed) {
  Eigen::MatrixXd latent;
  sample_latent_impl(fit, model, S, seed, &latent, nullptr);
  return latent;
}

ThetaDraws sample_theta(const PosteriorFit& fit, const LatentModel& model, int S,
                        std::uint64_t seed) {
  Eigen::MatrixXd latent;
  ThetaDraws out;
  sample_latent_impl(fit, model, S, seed, &latent, &out.rho);
  out.S = S;
  out.seed = seed;
  const int nc = model.map.n_cells();
  out.theta.resize(S, nc);
  for (int s = 0; s < S; ++s) {
    const Eigen::VectorXd x = latent.row(s).transpose();
    for (int c = 0; c < nc; ++c)
      out.theta(s, c) = expit_clamped(linear_predictor(model.map, x, c));
  }
  return out;
}

CpoResult compute_cpo(const ThetaDraws& draws, const CellTable& cells) {
  constexpr double kFloor = 1e-300;
  const int nc = static_cast<int>(cells.cells.size());
  if (draws.theta.cols() != nc) throw InputError("compute_cpo: draw layout does not match cells");
  CpoResult out;
  out.cpo = Eigen::VectorXd::Constant(nc, std::numeric_limits<double>::quiet_NaN());
  double sum_log = 0.0;
  int observed = 0;
  for (int c = 0; c < nc; ++c) {
    const Cell& cell = cells.cells[c];
    if (!cell.observed) continue;
    double inv_sum = 0.0;
    for (int s = 0; s < draws.S; ++s) {
      double pmf = std::exp(betabinom_logpmf(cell.y, cell.n, draws.theta(s, c), draws.rho[s]));
      if (pmf < kFloor) {
        pmf = kFloor;
        ++out.floor_hits;
      }
      inv_sum += 1.0 / pmf;
    }
    out.cpo[c] = static_cast<double>(draws.S) / inv_sum;
    sum_log += std::log(out.cpo[c]);
    ++observed;
  }
  out.lcpo = observed > 0 ? -sum_log / observed : 0.0;
  return out;
}

CpoResult compute_cpo(const PosteriorFit& fit, const LatentModel& model, const CellTable& cells,
                      int S, std::uint64_t seed) {
  return compute_cpo(sample_theta(fit, model, S, seed), cells);
}

std::string ThetaDraws::to_csv(const StrataScheme& scheme) const {
  std::ostringstream out;
  out << "draw,rho";
  for (int i = 0; i < scheme.I(); ++i)
    for (int j = 0; j < scheme.J(); ++j)
      for (int k = 0; k < scheme.K(); ++k)
        out << ',' << scheme.county_ids[i] << '|' << scheme.age_levels[j] << '|'
            << scheme.edu_levels[k];
  out << "\nseed," << seed;
  for (int c = 0; c < theta.cols(); ++c) out << ",0";
  out << '\n';
  for (int s = 0; s < S; ++s) {
    out << s << ',' << format_double(rho[s]);
    for (int c = 0; c < theta.cols(); ++c) out << ',' << format_double(theta(s, c));
    out << '\n';
  }
  return out.str();
}

ThetaDraws ThetaDraws::from_csv_file(const std::string& path, const StrataScheme& scheme) {
  const CsvTable csv = CsvTable::read_file(path);
  const int nc = scheme.n_cells();
  if (static_cast<int>(csv.header().size()) != nc + 2)
    throw InputError("draws file '" + path + "': expected " + std::to_string(nc + 2) +
                     " columns for this scheme, found " + std::to_string(csv.header().size()));
  // verify the cell ordering matches the scheme
  int col = 2;
  for (int i = 0; i < scheme.I(); ++i)
    for (int j = 0; j < scheme.J(); ++j)
      for (int k = 0; k < scheme.K(); ++k, ++col) {
        const std::string want = scheme.county_ids[i] + "|" + scheme.age_levels[j] + "|" +
                                 scheme.edu_levels[k];
        if (csv.header()[col] != want)
          throw InputError("draws file '" + path + "': cell column " + std::to_string(col) +
                           " is '" + csv.header()[col] + "', expected '" + want + "'");
      }
  if (csv.rows() < 2 || csv.cell(0, 0) != "seed")
    throw InputError("draws file '" + path + "': missing seed row");
  ThetaDraws d;
  d.seed = std::stoull(csv.cell(0, 1));
  d.S = static_cast<int>(csv.rows()) - 1;
  d.theta.resize(d.S, nc);
  d.rho.resize(d.S);
  for (int s = 0; s < d.S; ++s) {
    d.rho[s] = csv.double_cell(s + 1, "rho");
    for (int c = 0; c < nc; ++c) d.theta(s, c) = std::stod(csv.cell(s + 1, c + 2));
  }
  return d;
}

}  // namespace spmrp
