#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace deepesn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Error categories surfaced to callers; the CLI maps them to exit codes.
enum class ErrorKind {
  dimension,
  degenerate_configuration,
  unscalable_matrix,
  numerical,
  unsupported_configuration,
  invalid_argument,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace deepesn
