#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "hdqi/error.hpp"

namespace hdqi {

using cplx = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;
using DenseState = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Qubit cap for any dense 2^n x 2^n operator.
inline constexpr std::size_t kDefaultOperatorQubitCap = 12;
/// Qubit cap for any dense statevector.
inline constexpr std::size_t kDefaultStateQubitCap = 22;

inline void check_qubit_cap(std::size_t qubits, std::size_t cap, const char* what) {
  if (qubits > cap) {
    throw CapExceeded(std::string(what) + ": " + std::to_string(qubits) + " qubits exceeds cap of " +
                      std::to_string(cap));
  }
}

/// i^k for an integer exponent taken mod 4.
inline cplx i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

}  // namespace hdqi
