#pragma once

#include <stdexcept>
#include <string>

namespace otoclab {

// Precondition violations throw std::invalid_argument. The types below cover
// the remaining failure modes that callers are expected to tell apart.

/// Operation is not defined for the given input (e.g. non-bipartite lattice).
class Unsupported : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A least-squares design matrix does not determine the parameters.
class SingularFit : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An iterative fit did not produce a usable result.
class FitFailure : public std::runtime_error {
  public:
    FitFailure(const std::string &what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

  private:
    double best_residual_;
};

}  // namespace otoclab
