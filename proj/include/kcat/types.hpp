#pragma once

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kcat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

/// Relative tolerance used by every verification unless overridden.
/// Residual bounds are scaled by (1 + norm of the input).
inline constexpr double kDefaultTol = 1e-9;

/// Violated precondition: bad shapes, non-finite entries, malformed
/// documents, inputs that fail a required verification. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A construction failed one of its own certificates beyond tolerance.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kcat
