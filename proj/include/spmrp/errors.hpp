#ifndef SPMRP_ERRORS_HPP
#define SPMRP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spmrp {

// Invalid configuration, file contents, or arguments violating a contract.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A required artifact (draws file, estimates file) is absent.
struct MissingArtifactError : std::runtime_error {
  explicit MissingArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-convergence, singular system).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spmrp

#endif
