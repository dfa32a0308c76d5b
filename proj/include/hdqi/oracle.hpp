#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hdqi/dense.hpp"
#include "hdqi/error.hpp"
#include "hdqi/pauli.hpp"
#include "hdqi/poly.hpp"

namespace hdqi {

using DensityMatrix = Eigen::MatrixXcd;

/// sum_i c_i P_i as a dense matrix.
inline DenseOperator dense_hamiltonian(const PauliHamiltonian& h, std::size_t cap = kDefaultOperatorQubitCap) {
  check_qubit_cap(h.num_qubits(), cap, "dense_hamiltonian");
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << h.num_qubits());
  DenseOperator out = DenseOperator::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim); ++x) {
      auto [xp, k] = t.pauli.apply_to_basis(x);
      out(static_cast<Eigen::Index>(xp), static_cast<Eigen::Index>(x)) += t.coeff * i_pow(k);
    }
  }
  return out;
}

/// f(H) through the eigendecomposition of the Hermitian matrix H.
inline DenseOperator hermitian_function(const DenseOperator& h, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(h);
  if (es.info() != Eigen::Success) throw VerificationError("EigenFailure", "eigendecomposition did not converge");
  RealVector fv = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// P(H)^2 / Tr P(H)^2.
inline DensityMatrix rho_poly_oracle(const PauliHamiltonian& h, const Polynomial& p,
                                     std::size_t cap = kDefaultOperatorQubitCap) {
  DenseOperator rho = hermitian_function(dense_hamiltonian(h, cap), [&](double x) {
    const double v = p.eval(x);
    return v * v;
  });
  const double tr = rho.trace().real();
  if (!(tr > 1e-14)) {
    throw VerificationError("DegeneratePolynomial", "Tr P(H)^2 = " + std::to_string(tr) + " vanishes");
  }
  return rho / tr;
}

/// exp(-beta H) / Tr exp(-beta H), shifted by the smallest eigenvalue.
inline DensityMatrix gibbs_oracle(const PauliHamiltonian& h, double beta,
                                  std::size_t cap = kDefaultOperatorQubitCap) {
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(dense_hamiltonian(h, cap));
  if (es.info() != Eigen::Success) throw VerificationError("EigenFailure", "eigendecomposition did not converge");
  const RealVector& ev = es.eigenvalues();
  const double shift = ev.minCoeff();
  RealVector w = ev.unaryExpr([&](double x) { return std::exp(-beta * (x - shift)); });
  w /= w.sum();
  return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

inline void check_same_shape(const DenseOperator& a, const DenseOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError("operands have different dimensions", "DimensionError");
  }
}

/// Sum of singular values.
inline double trace_norm(const DenseOperator& a) {
  Eigen::JacobiSVD<DenseOperator> svd(a);
  return svd.singularValues().sum();
}

/// |rho - sigma|_1, sum of singular values of the difference.
inline double trace_norm_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_same_shape(rho, sigma);
  return trace_norm(rho - sigma);
}

/// (1/2) |rho - sigma|_1.
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return 0.5 * trace_norm_distance(rho, sigma);
}

/// Positive square root of a Hermitian PSD matrix (negative eigenvalues clipped).
inline DenseOperator psd_sqrt(const DenseOperator& a) {
  return hermitian_function(0.5 * (a + a.adjoint()), [](double x) { return std::sqrt(std::max(0.0, x)); });
}

/// Tr sqrt(sqrt(rho) sigma sqrt(rho)).
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_same_shape(rho, sigma);
  const DenseOperator s = psd_sqrt(rho);
  return psd_sqrt(s * sigma * s).trace().real();
}

inline double purity(const DensityMatrix& rho) { return (rho * rho).trace().real(); }

/// -Tr rho ln rho in nats.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log(p);
  }
  return s;
}

inline double expectation(const DensityMatrix& rho, const DenseOperator& op) { return (rho * op).trace().real(); }

}  // namespace hdqi
