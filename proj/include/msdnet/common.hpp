#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msdnet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

// Stacked quantities are stored column-per-block: a point x in X0^|V| is an
// n x |V| matrix whose column i is node i's block, and a dual variable u is an
// n x |E| matrix with one column per edge. With that layout the lifted
// operator (M (x) I_n) acts as a right-multiplication by M^T.
using Stacked = Mat;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid graph construction or graph file contents.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// A point outside the domain on which an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative method that did not reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long iterations, double residual)
      : Error(what + " (iterations=" + std::to_string(iterations) +
              ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  long iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  long iterations_;
  double residual_;
};

/// No dual certificate exists for the instance (the point is not optimal).
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete experiment configuration; `field` is a dotted path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Filesystem failure, carrying the offending path.
class IoError : public Error {
 public:
  IoError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Frobenius inner product of two equally shaped stacked quantities.
template <typename A, typename B>
double inner(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace msdnet
