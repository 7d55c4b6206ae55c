#include "spmrp/model.hpp"

#include <cmath>

#include "spmrp/errors.hpp"

namespace spmrp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

ModelSpec ModelSpec::by_name(const std::string& name, const PriorSettings& priors) {
  ModelSpec s;
  s.name = name;
  s.priors = priors;
  if (name == "iid") {
    s.edu_term = EduTerm::Fixed;
    s.county_term = CountyTerm::Iid;
  } else if (name == "rw1_iid") {
    s.edu_term = EduTerm::Rw1;
    s.county_term = CountyTerm::Iid;
  } else if (name == "rw1_bym2") {
    s.edu_term = EduTerm::Rw1;
    s.county_term = CountyTerm::Bym2;
  } else if (name == "bym2_edu") {
    s.edu_term = EduTerm::None;
    s.county_term = CountyTerm::Bym2PerEdu;
  } else {
    throw InputError("unknown model '" + name + "'; expected one of iid, rw1_iid, rw1_bym2, bym2_edu");
  }
  return s;
}

const std::vector<std::string>& ModelSpec::names() {
  static const std::vector<std::string> n{"iid", "rw1_iid", "rw1_bym2", "bym2_edu"};
  return n;
}

int ModelSpec::complexity(int K) const {
  int h = 1;  // overdispersion
  if (edu_term == EduTerm::Rw1) h += 1;
  switch (county_term) {
    case CountyTerm::Iid: h += 1; break;
    case CountyTerm::Bym2: h += 2; break;
    case CountyTerm::Bym2PerEdu: h += 2 * K; break;
  }
  return h;
}

std::string ModelSpec::description() const {
  if (name == "iid") return "fixed effect on age, fixed effect on education, IID by county";
  if (name == "rw1_iid") return "fixed effect on age, RW1 by education, IID by county";
  if (name == "rw1_bym2") return "fixed effect on age, RW1 by education, BYM2 by county";
  return "fixed effect on age, BYM2 by education";
}

LatentModel build_latent_model(const ModelSpec& spec, const CellTable& cells,
                               const AdjacencyGraph& graph, const StrataScheme& scheme) {
  scheme.validate();
  if (static_cast<int>(cells.cells.size()) != scheme.n_cells())
    throw InputError("build_latent_model: cell table does not match the scheme");
  const int I = scheme.I(), J = scheme.J(), K = scheme.K();
  const bool needs_graph =
      spec.county_term == CountyTerm::Bym2 || spec.county_term == CountyTerm::Bym2PerEdu;
  if (needs_graph && graph.n_nodes() != I)
    throw InputError("build_latent_model: adjacency graph does not cover the scheme counties");

  LatentModel m;
  m.scheme = scheme;
  m.spec = spec;

  int off = 0;
  auto add_block = [&](LatentBlock b) {
    b.offset = off;
    off += b.size;
    m.blocks.push_back(b);
    return static_cast<int>(m.blocks.size()) - 1;
  };
  auto add_hyper = [&](HyperEntry::Kind kind, const std::string& name, int block) {
    m.hypers.push_back({kind, name, block});
    return static_cast<int>(m.hypers.size()) - 1;
  };

  add_block({LatentBlock::Kind::Fixed, "alpha", 0, 1, 0, 0, -1, -1});
  add_block({LatentBlock::Kind::Fixed, "lambda", 0, J, 0, 0, -1, -1});

  int edu_offset = -1;
  if (spec.edu_term != EduTerm::None) {
    LatentBlock b;
    b.name = "beta";
    b.size = K;
    if (spec.edu_term == EduTerm::Fixed) {
      b.kind = LatentBlock::Kind::Fixed;
    } else {
      b.kind = LatentBlock::Kind::Rw1;
      b.rank = K - 1;
      m.rw1_structure = scale_structure(rw1_precision(K));
    }
    const int bi = add_block(b);
    edu_offset = m.blocks[bi].offset;
    if (spec.edu_term == EduTerm::Rw1)
      m.blocks[bi].tau_index = add_hyper(HyperEntry::Kind::LogTau, "log_tau_beta", bi);
  }

  if (needs_graph) m.icar_structure = scale_structure(icar_precision(graph));

  std::vector<int> county_block_offsets;  // per education level for Bym2PerEdu
  int county_offset = -1;
  if (spec.county_term == CountyTerm::Iid) {
    LatentBlock b{LatentBlock::Kind::Iid, "epsilon", 0, I, I, I, -1, -1};
    const int bi = add_block(b);
    county_offset = m.blocks[bi].offset;
    m.blocks[bi].tau_index = add_hyper(HyperEntry::Kind::LogTau, "log_tau_epsilon", bi);
  } else if (spec.county_term == CountyTerm::Bym2) {
    LatentBlock b{LatentBlock::Kind::Bym2, "gamma", 0, 2 * I, I, I, -1, -1};
    const int bi = add_block(b);
    county_offset = m.blocks[bi].offset;
    m.blocks[bi].tau_index = add_hyper(HyperEntry::Kind::LogTau, "log_tau_gamma", bi);
    m.blocks[bi].phi_index = add_hyper(HyperEntry::Kind::LogitPhi, "logit_phi_gamma", bi);
  } else {
    for (int k = 0; k < K; ++k) {
      LatentBlock b{LatentBlock::Kind::Bym2, "gamma_" + scheme.edu_levels[k], 0, 2 * I, I, I, -1, -1};
      const int bi = add_block(b);
      county_block_offsets.push_back(m.blocks[bi].offset);
      m.blocks[bi].tau_index =
          add_hyper(HyperEntry::Kind::LogTau, "log_tau_gamma_" + scheme.edu_levels[k], bi);
      m.blocks[bi].phi_index =
          add_hyper(HyperEntry::Kind::LogitPhi, "logit_phi_gamma_" + scheme.edu_levels[k], bi);
    }
  }
  m.rho_index = add_hyper(HyperEntry::Kind::LogitRho, "logit_rho", -1);
  m.latent_dim = off;

  if (needs_graph)
    m.mixing_prior =
        std::make_shared<PcMixingSpec>(spec.priors.phi_u, spec.priors.phi_a, *m.icar_structure);

  // constraints over the full latent vector
  for (const auto& b : m.blocks) {
    if (b.kind == LatentBlock::Kind::Rw1) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(m.latent_dim);
      a.segment(b.offset, b.size).setOnes();
      m.constraints.push_back(a);
    } else if (b.kind == LatentBlock::Kind::Bym2) {
      // per-component sum-to-zero on the structured copy; a singleton
      // component's constraint pins its node to zero
      for (const auto& c : m.icar_structure->base.constraints) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(m.latent_dim);
        a.segment(b.offset + b.n, b.n) = c;
        m.constraints.push_back(a);
      }
    }
  }
  // prior rank of a BYM2 structured copy: nodes minus per-component constraints
  for (auto& b : m.blocks)
    if (b.kind == LatentBlock::Kind::Bym2)
      b.rank = b.n - m.icar_structure->base.rank_deficiency;

  // cell map
  m.map.latent_dim = m.latent_dim;
  m.map.cells.resize(scheme.n_cells());
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k) {
        auto& terms = m.map.cells[scheme.cell_index(i, j, k)];
        terms.add(0);
        terms.add(1 + j);
        if (edu_offset >= 0) terms.add(edu_offset + k);
        if (spec.county_term == CountyTerm::Bym2PerEdu)
          terms.add(county_block_offsets[k] + i);
        else
          terms.add(county_offset + i);
      }
  return m;
}

void LatentModel::fix_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("fix_rho: rho must lie in (0,1)");
  if (rho_index >= 0) {
    hypers.erase(hypers.begin() + rho_index);  // always the last entry
    rho_index = -1;
  }
  fixed_rho = rho;
}

Eigen::MatrixXd LatentModel::prior_precision(const Eigen::VectorXd& psi) const {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(latent_dim, latent_dim);
  for (const auto& b : blocks) {
    switch (b.kind) {
      case LatentBlock::Kind::Fixed:
        for (int i = 0; i < b.size; ++i)
          Q(b.offset + i, b.offset + i) = 1.0 / spec.priors.fixed_effect_var;
        break;
      case LatentBlock::Kind::Iid: {
        const double tau = std::exp(psi[b.tau_index]);
        for (int i = 0; i < b.size; ++i) Q(b.offset + i, b.offset + i) = tau;
        break;
      }
      case LatentBlock::Kind::Rw1: {
        const double tau = std::exp(psi[b.tau_index]);
        Q.block(b.offset, b.offset, b.size, b.size) = tau * rw1_structure->dense();
        for (int i = 0; i < b.size; ++i) Q(b.offset + i, b.offset + i) += jitter;
        break;
      }
      case LatentBlock::Kind::Bym2: {
        const double tau = std::exp(psi[b.tau_index]);
        const double phi = expit_clamped(psi[b.phi_index]);
        const int n = b.n;
        const double gg = tau / (1.0 - phi);
        const double gu = -std::sqrt(tau * phi) / (1.0 - phi);
        const double uu = phi / (1.0 - phi);
        for (int i = 0; i < n; ++i) {
          Q(b.offset + i, b.offset + i) = gg;
          Q(b.offset + i, b.offset + n + i) = gu;
          Q(b.offset + n + i, b.offset + i) = gu;
          Q(b.offset + n + i, b.offset + n + i) = uu + jitter;
        }
        Q.block(b.offset + n, b.offset + n, n, n) += icar_structure->dense();
        break;
      }
    }
  }
  return Q;
}

double LatentModel::prior_logdensity(const Eigen::VectorXd& x, const Eigen::VectorXd& psi) const {
  double lp = 0.0;
  for (const auto& b : blocks) {
    const auto seg = x.segment(b.offset, b.size);
    switch (b.kind) {
      case LatentBlock::Kind::Fixed:
        lp += -0.5 * seg.squaredNorm() / spec.priors.fixed_effect_var;
        break;
      case LatentBlock::Kind::Iid: {
        const double tau = std::exp(psi[b.tau_index]);
        lp += 0.5 * b.size * psi[b.tau_index] - 0.5 * tau * seg.squaredNorm();
        break;
      }
      case LatentBlock::Kind::Rw1: {
        const double tau = std::exp(psi[b.tau_index]);
        const Eigen::VectorXd Qx = rw1_structure->scaled_Q * seg;
        lp += 0.5 * b.rank * psi[b.tau_index] - 0.5 * tau * seg.dot(Qx);
        break;
      }
      case LatentBlock::Kind::Bym2: {
        const double tau = std::exp(psi[b.tau_index]);
        const double phi = expit_clamped(psi[b.phi_index]);
        const auto gamma = x.segment(b.offset, b.n);
        const auto ustar = x.segment(b.offset + b.n, b.n);
        const Eigen::VectorXd resid = gamma - std::sqrt(phi / tau) * ustar;
        const Eigen::VectorXd Qu = icar_structure->scaled_Q * ustar;
        lp += 0.5 * b.n * (psi[b.tau_index] - std::log1p(-phi)) -
              0.5 * tau / (1.0 - phi) * resid.squaredNorm() - 0.5 * ustar.dot(Qu);
        break;
      }
    }
  }
  return lp;
}

double LatentModel::hyper_logprior(const Eigen::VectorXd& psi) const {
  double lp = 0.0;
  for (int h = 0; h < n_hyper(); ++h) {
    const auto& e = hypers[h];
    switch (e.kind) {
      case HyperEntry::Kind::LogTau: {
        const auto& b = blocks[e.block];
        const PcPrecisionSpec& prior = (b.kind == LatentBlock::Kind::Bym2)
                                           ? spec.priors.tau_bym2
                                           : spec.priors.tau_nonspatial;
        const double tau = std::exp(psi[h]);
        lp += pc_precision_logdensity(tau, prior) + psi[h];  // Jacobian d tau / d log tau
        break;
      }
      case HyperEntry::Kind::LogitPhi: {
        const double phi = expit_clamped(psi[h]);
        lp += mixing_prior->logdensity(phi) + std::log(phi) + std::log1p(-phi);
        break;
      }
      case HyperEntry::Kind::LogitRho: {
        const double var = spec.priors.rho_logit_var;
        lp += -0.5 * (kLog2Pi + std::log(var)) - psi[h] * psi[h] / (2.0 * var);
        break;
      }
    }
  }
  return lp;
}

Eigen::VectorXd LatentModel::psi_start() const {
  Eigen::VectorXd psi(n_hyper());
  for (int h = 0; h < n_hyper(); ++h) {
    switch (hypers[h].kind) {
      case HyperEntry::Kind::LogTau: psi[h] = std::log(4.0); break;
      case HyperEntry::Kind::LogitPhi: psi[h] = 0.0; break;
      case HyperEntry::Kind::LogitRho: psi[h] = -2.0; break;
    }
  }
  return psi;
}

}  // namespace spmrp
