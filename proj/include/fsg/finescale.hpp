#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fsg/distribution.hpp"
#include "fsg/greens.hpp"
#include "fsg/projection.hpp"
#include "fsg/quadrature.hpp"

namespace fsg {

struct FineScaleConfig {
  int quad_points = kDefaultQuadPoints;
  int sample_points = 1001;
};

// Whether integrals over x of kernel-derived integrands are split at the
// source point s.
enum class KinkHandling { Split, Naive };

/// G' = G - G mu^T [mu G mu^T]^-1 mu G for a kernel and a set of mu.
///
/// G acts on distributions: G rho (x) = int g(x,s) rho(s) ds, with point
/// masses and dipoles handled exactly.  G mu_i means G applied to the
/// distribution that represents mu_i in the flavor pairing (see
/// MuSet::functional); the matrix entries are flavor pairings
/// <mu_i, G mu_j>.
class FineScaleOperator {
 public:
  FineScaleOperator(GreensKernel1D kernel, MuSet mu, FineScaleConfig cfg = {});

  const GreensKernel1D& kernel() const { return kernel_; }
  const MuSet& mu() const { return mu_; }
  Flavor pairing() const { return mu_.flavor(); }
  int size() const { return mu_.size(); }
  const QuadratureRule& rule() const { return rule_; }
  const Mesh1D& mesh() const { return mu_.family().mesh(); }

  // One-sided limit to use at x: from inside the element that owns x.
  Side owning_side(double x) const;

  double green_apply(const Distribution& r, double x, Side side) const;
  double green_apply_dx(const Distribution& r, double x, Side side) const;

  double g_mu_direct(int i, double x, Side side = Side::Left) const;
  double g_mu_direct_dx(int i, double x, Side side = Side::Left) const;
  // Cubic Hermite interpolation of the cached samples.
  double g_mu(int i, double x) const;
  void g_mu_all(double x, Eigen::Ref<Eigen::VectorXd> out) const;
  std::span<const double> sample_grid() const { return grid_; }

  const Eigen::MatrixXd& mu_g_mu() const { return a_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  // <mu_i, g(., s)> for every i.
  void mu_g_rows(double s, Eigen::Ref<Eigen::VectorXd> out, KinkHandling k = KinkHandling::Split) const;
  double mu_g_row(int i, double s, KinkHandling k = KinkHandling::Split) const;

  // <mu_i, G r> for every i.
  Eigen::VectorXd apply_mu_g(const Distribution& r, KinkHandling k = KinkHandling::Split) const;

  // Flavor pairing of every mu_i with a function (value, derivative, kinks).
  Eigen::VectorXd pair_with(const std::function<double(double)>& value,
                            const std::function<double(double)>& deriv,
                            std::span<const double> kinks) const;

  double eval(double x, double s, KinkHandling k = KinkHandling::Split) const;
  // G'(x, s) for every x in xs, sharing the work for the row at s.
  std::vector<double> eval_column(std::span<const double> xs, double s,
                                  KinkHandling k = KinkHandling::Split) const;

  std::vector<double> reconstruct(const Distribution& r, std::span<const double> grid,
                                  KinkHandling k = KinkHandling::Split) const;

  // sum_j G mu_j(x) (A^-1)_ji for every i.
  Eigen::VectorXd resolved_basis(double x) const;

 private:
  struct Both {
    double value;
    double dx;
  };
  Both apply_both(const Distribution& r, double x, Side side, bool want_dx) const;
  std::vector<double> cuts_with(std::span<const double> base, double x) const;

  GreensKernel1D kernel_;
  MuSet mu_;
  FineScaleConfig cfg_;
  QuadratureRule rule_;
  std::vector<Distribution> functionals_;
  std::vector<double> grid_;
  Eigen::MatrixXd val_, dleft_, dright_;  // size x grid
  Eigen::MatrixXd a_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_t_;
};

/// Uniform refinement of every element into cells, with per-cell
/// Gauss-Legendre points; used to represent fine-scale fields.
class FineGrid {
 public:
  FineGrid(const Mesh1D& mesh, int cells, int points_per_cell);

  std::span<const double> nodes() const { return nodes_; }
  int num_cells() const { return static_cast<int>(nodes_.size()) - 1; }
  // Node index of each mesh boundary.
  std::span<const int> element_nodes() const { return element_nodes_; }
  std::span<const double> points() const { return pts_; }
  std::span<const double> weights() const { return wts_; }
  std::span<const int> point_cell() const { return cell_; }
  std::span<const int> point_element() const { return elem_; }
  int points_per_cell() const { return q_; }
  int element_of_cell(int c) const { return cell_elem_[c]; }

 private:
  std::vector<double> nodes_;
  std::vector<int> element_nodes_;
  std::vector<int> cell_elem_;
  std::vector<double> pts_, wts_;
  std::vector<int> cell_, elem_;
  int q_;
};

/// O(cells) application of G' for the Poisson kernel on a FineGrid, with
/// the residual density given at the grid's quadrature points.
class FineGridApplicator {
 public:
  FineGridApplicator(const FineScaleOperator& op, const FineGrid& grid);

  const FineGrid& grid() const { return grid_; }
  // u' at the grid nodes.
  std::vector<double> apply(std::span<const double> density, std::span<const PointMass> masses) const;
  Eigen::VectorXd apply_mu_g(std::span<const double> density, std::span<const PointMass> masses) const;

 private:
  const FineScaleOperator& op_;
  FineGrid grid_;
  int n_;
  std::vector<double> mtab_;  // size x points, row-major
  std::vector<double> gtab_;  // nodes x size, row-major
  std::vector<double> s_w_, r_w_;
};

/// Cubic interpolant of nodal samples, built independently on each segment
/// between consecutive break nodes (slopes from a C2 spline with cubic
/// one-sided end slopes).
class PiecewiseSpline {
 public:
  PiecewiseSpline() = default;
  PiecewiseSpline(std::vector<double> nodes, std::vector<double> values, std::span<const int> break_nodes);

  std::span<const double> nodes() const { return x_; }
  std::span<const double> values() const { return y_; }
  double value(double x) const;
  double deriv(double x) const;
  // evaluation inside a known cell [nodes[c], nodes[c+1]]
  double value_in(int c, double x) const;
  double deriv_in(int c, double x) const;

 private:
  int cell_of(double x) const;
  std::vector<double> x_, y_, m_;
};

}  // namespace fsg
