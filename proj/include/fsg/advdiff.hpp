#pragma once

#include <memory>
#include <vector>

#include "fsg/finescale.hpp"

namespace fsg {

/// c u' - nu u'' = f on [0, L], u(0) = u(L) = 0.
struct AdvDiffProblem {
  double c = 1.0;
  double nu = 0.01;
  Function1D f;
  double length = 1.0;

  double alpha() const { return c * length / (2.0 * nu); }
};

// Closed-form solution for f = 1.
double advdiff_exact(double x, double c, double nu, double length = 1.0);
double advdiff_exact_deriv(double x, double c, double nu, double length = 1.0);
AdvDiffProblem constant_source_problem(double c, double nu, double length = 1.0);
Function1D constant_source_solution(double c, double nu, double length = 1.0);

/// Standard Galerkin solve on the nodal space with zero boundary values.
Field galerkin_solve(const AdvDiffProblem& problem, const BasisFamily& family,
                     const QuadratureRule& rule);
Field galerkin_solve(const AdvDiffProblem& problem, const BasisFamily& family);

struct ExactGradientResult {
  Field u_bar;
  std::vector<double> grid;
  std::vector<double> u_prime;
};

/// Fine scales of the projection of a known solution, using its exact
/// gradient in the advective part of the residual:
///   u' = G'(f/nu - (c/nu) u_exact' + u_bar'')  with the Poisson G'.
ExactGradientResult exact_gradient_reconstruction(const AdvDiffProblem& problem, const Function1D& u_exact,
                                                  const BasisFamily& family, Flavor flavor,
                                                  std::span<const double> grid, FineScaleConfig cfg = {});

struct VmsSettings {
  double w = 0.0;  // <= 0 selects 1/(2 alpha), capped at 1
  double eps = 1e-8;
  int max_iter = 100000;
  int fine_cells = 2000;
  int cell_points = 4;
  FineScaleConfig fine{};
};

struct IterationState {
  Field u_bar;
  PiecewiseSpline u_prime;
  int iterations = 0;
  std::vector<double> history;  // L2 norm of each u_bar increment
  bool converged = false;
};

/// Coupled coarse/fine fixed-point iteration with under-relaxation:
///   N(u_bar) = (mu, f/nu) + (c/nu) (mu', u_bar + u')
///   u'       = G'(f/nu - (c/nu) u_bar' - (c/nu) u'' + u_bar'')
class VmsIteration {
 public:
  VmsIteration(AdvDiffProblem problem, BasisFamily family, VmsSettings settings = {});

  const AdvDiffProblem& problem() const { return problem_; }
  const MuSet& mu() const { return op_->mu(); }
  const FineScaleOperator& op() const { return *op_; }
  const FineGrid& grid() const { return grid_; }
  double relaxation() const { return w_; }

  // Interior nodal coefficients of the coarse update.
  Eigen::VectorXd coarse_update(const Field& u_bar, const PiecewiseSpline& u_prime) const;
  // u' at the fine grid nodes.
  std::vector<double> fine_update(const Field& u_bar, const PiecewiseSpline& u_prime) const;
  PiecewiseSpline make_fine(std::vector<double> node_values) const;

  IterationState run() const;
  // Continues from a given state for up to extra iterations.
  IterationState run_from(IterationState state, int extra) const;

  double l2_norm(const Eigen::VectorXd& nodal_coeffs) const;

 private:
  AdvDiffProblem problem_;
  BasisFamily family_;
  VmsSettings settings_;
  double w_;
  std::unique_ptr<FineScaleOperator> op_;
  FineGrid grid_;
  std::unique_ptr<FineGridApplicator> applicator_;
  MassMatrix mass_;
  Eigen::VectorXd source_pair_;   // (mu, f/nu)
  Eigen::MatrixXd mu_psi_;        // (mu_i', psi_j) over all nodal j
  Eigen::MatrixXd mud_w_;         // w_q mu_i'(s_q)
  Eigen::MatrixXd psi_d_, psi_dd_;  // psi_j', psi_j'' at the fine points
  std::vector<double> f_nu_;      // f/nu at the fine points
};

}  // namespace fsg
