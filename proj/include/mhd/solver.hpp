#pragma once

// Newton iteration for the discrete MHD system.

#include <stdexcept>
#include <string>
#include <vector>

#include "mhd/forms.hpp"

namespace mhd {

enum class InitialGuess { Zero, DecoupledLinear };

struct NewtonConfig {
  double tol = 1e-10;  // on |grad(u^n - u^{n-1})|_L2
  int max_iter = 30;
  InitialGuess initial_guess = InitialGuess::Zero;
  std::string dump_dir;  // when nonempty, dump each Newton matrix there
};

struct NewtonResult {
  MhdState state;
  std::vector<double> increments;  // |grad(u^n - u^{n-1})| per iteration
  int iterations = 0;
};

class NonconvergenceError : public std::runtime_error {
 public:
  NonconvergenceError(const std::string& what, std::vector<double> increments)
      : std::runtime_error(what), increments_(std::move(increments)) {}
  const std::vector<double>& increments() const { return increments_; }

 private:
  std::vector<double> increments_;
};

// Boundary dofs carry the interpolated essential data; interior dofs are zero
// (Zero) or come from one decoupled Stokes + Maxwell linear solve.
MhdState initial_state(const BenchmarkProblem& problem, const MhdSpaces& spaces,
                       InitialGuess guess);

NewtonResult newton_solve(const BenchmarkProblem& problem, const MhdSpaces& spaces,
                          const NewtonConfig& config = {});

// |grad w|_L2 of a velocity-space function, by elementwise quadrature.
double h1_seminorm(const FeFunction& w);
double l2_norm(const FeFunction& w);

}  // namespace mhd
