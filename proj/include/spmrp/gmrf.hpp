#ifndef SPMRP_GMRF_HPP
#define SPMRP_GMRF_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "spmrp/ingest.hpp"

namespace spmrp {

// Intrinsic GMRF precision structure with its identifiability constraints.
// Each constraint vector a imposes a.dot(x) = 0 and lies in the null space
// of Q; the null space dimension equals rank_deficiency.
struct StructureMatrix {
  int dim = 0;
  Eigen::SparseMatrix<double> Q;
  int rank_deficiency = 0;
  std::vector<Eigen::VectorXd> constraints;
  std::vector<int> component_of;  // node -> component id (RW1: all zero)

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(Q); }
};

// Structure scaled so the constrained generalized inverse of scaled_Q has
// unit geometric-mean marginal variance over non-isolated nodes.
struct ScaledStructure {
  StructureMatrix base;
  double scale_s = 1.0;
  Eigen::SparseMatrix<double> scaled_Q;
  std::vector<bool> isolated;  // per node

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(scaled_Q); }
  // Eigenvalues of scaled_Q, ascending; the smallest rank_deficiency are the
  // null directions.
  Eigen::VectorXd eigenvalues() const;
};

// Tridiagonal first-difference penalty with a sum-to-zero constraint.
StructureMatrix rw1_precision(int K);

// Besag graph precision: diag(degree) - adjacency, one sum-to-zero
// constraint per connected component (a singleton's constraint pins it to 0).
StructureMatrix icar_precision(const AdjacencyGraph& graph);

ScaledStructure scale_structure(const StructureMatrix& Q);

// gamma = sigma * (sqrt(1-phi) * v + sqrt(phi) * u_star)
Eigen::VectorXd bym2_effect(const Eigen::VectorXd& v, const Eigen::VectorXd& u_star, double sigma,
                            double phi);

// Conditioning by kriging: x - Q^{-1} A' (A Q^{-1} A')^{-1} A x under the
// supplied (proper) precision. Applied to samples post-draw.
Eigen::VectorXd constrain(const Eigen::VectorXd& x,
                          const std::vector<Eigen::VectorXd>& constraints,
                          const Eigen::MatrixXd& precision);

// Sparse triplet text (Matrix-Market style header) for debugging.
std::string to_triplet_text(const Eigen::SparseMatrix<double>& Q);

}  // namespace spmrp

#endif
