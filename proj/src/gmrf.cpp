#include "spmrp/gmrf.hpp"

#include <cmath>
#include <sstream>

#include "spmrp/errors.hpp"

namespace spmrp {

Eigen::VectorXd ScaledStructure::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense());
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  return es.eigenvalues();
}

StructureMatrix rw1_precision(int K) {
  if (K < 2) throw InputError("rw1_precision: need K >= 2 levels");
  StructureMatrix s;
  s.dim = K;
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < K; ++k) {
    const double d = (k == 0 || k == K - 1) ? 1.0 : 2.0;
    trips.emplace_back(k, k, d);
    if (k + 1 < K) {
      trips.emplace_back(k, k + 1, -1.0);
      trips.emplace_back(k + 1, k, -1.0);
    }
  }
  s.Q.resize(K, K);
  s.Q.setFromTriplets(trips.begin(), trips.end());
  s.rank_deficiency = 1;
  s.constraints.push_back(Eigen::VectorXd::Ones(K));
  s.component_of.assign(K, 0);
  return s;
}

StructureMatrix icar_precision(const AdjacencyGraph& graph) {
  const int n = graph.n_nodes();
  if (n == 0) throw InputError("icar_precision: empty graph");
  StructureMatrix s;
  s.dim = n;
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> degree(n, 0.0);
  for (const auto& e : graph.edges) {
    trips.emplace_back(e.first, e.second, -1.0);
    trips.emplace_back(e.second, e.first, -1.0);
    degree[e.first] += 1.0;
    degree[e.second] += 1.0;
  }
  for (int i = 0; i < n; ++i)
    if (degree[i] > 0.0) trips.emplace_back(i, i, degree[i]);
  s.Q.resize(n, n);
  s.Q.setFromTriplets(trips.begin(), trips.end());
  s.component_of = graph.component_of;
  s.rank_deficiency = graph.n_components;
  for (int c = 0; c < graph.n_components; ++c) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (graph.component_of[i] == c) a[i] = 1.0;
    s.constraints.push_back(a);
  }
  return s;
}

ScaledStructure scale_structure(const StructureMatrix& Q) {
  ScaledStructure out;
  out.base = Q;
  const int n = Q.dim;
  out.isolated.assign(n, false);
  const Eigen::MatrixXd D = Q.dense();
  for (int i = 0; i < n; ++i) out.isolated[i] = D(i, i) == 0.0;

  // group nodes by component
  int n_comp = 1;
  std::vector<int> comp = Q.component_of;
  if (comp.empty()) comp.assign(n, 0);
  for (int c : comp) n_comp = std::max(n_comp, c + 1);
  std::vector<std::vector<int>> members(n_comp);
  for (int i = 0; i < n; ++i) members[comp[i]].push_back(i);

  double log_sum = 0.0;
  int count = 0;
  for (const auto& nodes : members) {
    if (nodes.size() < 2) continue;
    const int m = static_cast<int>(nodes.size());
    Eigen::MatrixXd B(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) B(r, c) = D(nodes[r], nodes[c]);
    // (Q_c + 11'/m)^{-1} = pinv(Q_c) + 11'/m on a connected intrinsic block,
    // so the constrained marginal variances are the inverse diagonal - 1/m.
    B.array() += 1.0 / m;
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success)
      throw NumericError("scale_structure: component factorization failed");
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
    for (int r = 0; r < m; ++r) {
      const double var = inv(r, r) - 1.0 / m;
      if (var <= 0.0) throw NumericError("scale_structure: nonpositive marginal variance");
      log_sum += std::log(var);
      ++count;
    }
  }
  if (count == 0) throw InputError("scale_structure: no structure to scale (all nodes isolated)");
  out.scale_s = std::exp(log_sum / count);
  out.scaled_Q = Q.Q * out.scale_s;
  return out;
}

Eigen::VectorXd bym2_effect(const Eigen::VectorXd& v, const Eigen::VectorXd& u_star, double sigma,
                            double phi) {
  if (v.size() != u_star.size()) throw InputError("bym2_effect: length mismatch");
  if (!(phi >= 0.0 && phi <= 1.0)) throw InputError("bym2_effect: phi outside [0,1]");
  if (sigma < 0.0) throw InputError("bym2_effect: negative sigma");
  return sigma * (std::sqrt(1.0 - phi) * v + std::sqrt(phi) * u_star);
}

Eigen::VectorXd constrain(const Eigen::VectorXd& x,
                          const std::vector<Eigen::VectorXd>& constraints,
                          const Eigen::MatrixXd& precision) {
  if (constraints.empty()) return x;
  const int n = static_cast<int>(x.size());
  const int k = static_cast<int>(constraints.size());
  Eigen::MatrixXd At(n, k);
  for (int c = 0; c < k; ++c) {
    if (constraints[c].size() != n) throw InputError("constrain: constraint length mismatch");
    At.col(c) = constraints[c];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericError("constrain: precision not positive definite");
  const Eigen::MatrixXd QinvAt = llt.solve(At);           // n x k
  const Eigen::MatrixXd S = At.transpose() * QinvAt;      // k x k
  Eigen::LLT<Eigen::MatrixXd> sllt(S);
  if (sllt.info() != Eigen::Success) throw NumericError("constrain: singular A Q^- A'");
  const Eigen::VectorXd Ax = At.transpose() * x;
  return x - QinvAt * sllt.solve(Ax);
}

std::string to_triplet_text(const Eigen::SparseMatrix<double>& Q) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::ostringstream body;
  long nnz = 0;
  for (int col = 0; col < Q.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Q, col); it; ++it) {
      if (it.row() < it.col()) continue;  // lower triangle
      body << (it.row() + 1) << ' ' << (it.col() + 1) << ' ' << it.value() << '\n';
      ++nnz;
    }
  out << Q.rows() << ' ' << Q.cols() << ' ' << nnz << '\n' << body.str();
  return out.str();
}

}  // namespace spmrp
