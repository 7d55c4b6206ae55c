#ifndef SPMRP_MODEL_HPP
#define SPMRP_MODEL_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spmrp/gmrf.hpp"
#include "spmrp/ingest.hpp"
#include "spmrp/likelihood.hpp"
#include "spmrp/priors.hpp"

namespace spmrp {

enum class EduTerm { Fixed, Rw1, None };
enum class CountyTerm { Iid, Bym2, Bym2PerEdu };

struct PriorSettings {
  PcPrecisionSpec tau_nonspatial{0.5, 0.1};  // RW1 and IID variance components
  PcPrecisionSpec tau_bym2{1.0, 0.01};
  double phi_u = 0.5;
  double phi_a = 2.0 / 3.0;
  double rho_logit_var = 1.0 / 0.4;
  double fixed_effect_var = 1000.0;
};

// One row of the model roster. The four legal combinations:
//   iid       fixed age, fixed education, IID county
//   rw1_iid   fixed age, RW1 education, IID county
//   rw1_bym2  fixed age, RW1 education, BYM2 county
//   bym2_edu  fixed age, BYM2 per education level (implicit IID county)
struct ModelSpec {
  std::string name;
  EduTerm edu_term = EduTerm::Fixed;
  CountyTerm county_term = CountyTerm::Iid;
  PriorSettings priors;

  static ModelSpec by_name(const std::string& name, const PriorSettings& priors = {});
  static const std::vector<std::string>& names();
  // Hyperparameter count for K education levels; the tie-break key when
  // ranking models.
  int complexity(int K) const;
  std::string description() const;
};

struct LatentBlock {
  enum class Kind { Fixed, Iid, Rw1, Bym2 };
  Kind kind = Kind::Fixed;
  std::string name;
  int offset = 0;
  int size = 0;      // Bym2: 2n (total effect then structured copy)
  int n = 0;         // Bym2: nodes per copy
  int rank = 0;      // prior rank: multiplies log tau in the density
  int tau_index = -1;
  int phi_index = -1;
};

struct HyperEntry {
  enum class Kind { LogTau, LogitPhi, LogitRho };
  Kind kind;
  std::string name;
  int block = -1;
};

// A ModelSpec compiled against data: latent layout, structure matrices with
// constraints, hyperparameter layout, and the cell map.
struct LatentModel {
  StrataScheme scheme;
  ModelSpec spec;
  int latent_dim = 0;
  LinearPredictorMap map;
  std::vector<LatentBlock> blocks;
  std::optional<ScaledStructure> rw1_structure;
  std::optional<ScaledStructure> icar_structure;
  std::shared_ptr<PcMixingSpec> mixing_prior;  // shared across BYM2 blocks
  std::vector<Eigen::VectorXd> constraints;    // over the full latent vector
  std::vector<HyperEntry> hypers;
  int rho_index = -1;                 // position of logit rho in psi
  std::optional<double> fixed_rho;    // internal binomial-limit mode for tests
  double jitter = 1e-8;

  int n_hyper() const { return static_cast<int>(hypers.size()); }
  double rho_of(const Eigen::VectorXd& psi) const {
    return fixed_rho ? *fixed_rho : expit_clamped(psi[rho_index]);
  }
  // Pin the overdispersion (binomial limit when tiny); drops the logit rho
  // hyperparameter. Internal, used by tests and simulations.
  void fix_rho(double rho);

  // Dense prior precision at hyperparameters psi (intrinsic blocks carry the
  // jitter ridge so the matrix is invertible).
  Eigen::MatrixXd prior_precision(const Eigen::VectorXd& psi) const;
  // Exact constrained prior log-density at x (additive constants dropped;
  // generalized-determinant exponents included).
  double prior_logdensity(const Eigen::VectorXd& x, const Eigen::VectorXd& psi) const;
  // Log prior of the hyperparameters in transformed coordinates
  // (Jacobians included).
  double hyper_logprior(const Eigen::VectorXd& psi) const;
  // Default starting point for optimizers.
  Eigen::VectorXd psi_start() const;
};

LatentModel build_latent_model(const ModelSpec& spec, const CellTable& cells,
                               const AdjacencyGraph& graph, const StrataScheme& scheme);

}  // namespace spmrp

#endif
