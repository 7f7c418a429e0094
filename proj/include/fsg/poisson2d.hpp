#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fsg/basis.hpp"
#include "fsg/distribution.hpp"
#include "fsg/greens.hpp"

namespace fsg {

/// Tensor-product mesh of the unit square, same N and p in both directions.
class Mesh2D {
 public:
  Mesh2D(int num_elements, int degree);

  const BasisFamily& family() const { return family_; }
  const Mesh1D& mesh1d() const { return family_.mesh(); }
  // interior nodes per direction
  int n1() const { return family_.mesh().num_nodal_dofs() - 2; }
  int num_interior() const { return n1() * n1(); }
  // interior index k = ix + n1 * iy (ix, iy zero based)
  int index(int ix, int iy) const { return ix + n1() * iy; }

  // B_k(x, y) = b_ix(x) b_iy(y) with b_i the (i+1)-th global nodal function
  double basis(int k, double x, double y) const;
  void interior_values(double x, Eigen::Ref<Eigen::VectorXd> out) const;
  void interior_derivs(double x, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  BasisFamily family_;
};

struct Function2D {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dy;
};

/// Sum of products scale * X(x) * Y(y).
struct Separable2D {
  struct Term {
    double scale = 1.0;
    Function1D x;
    Function1D y;
  };
  std::vector<Term> terms;

  double value(double x, double y) const;
};

/// Interior nodal coefficients, ordered like Mesh2D::index.
struct Field2D {
  Eigen::VectorXd coeffs;
};

double eval(const Mesh2D& mesh, const Field2D& f, double x, double y);

/// Stiffness over interior tensor nodes by direct tensor quadrature.
Eigen::MatrixXd stiffness_2d(const Mesh2D& mesh, int points = 12);
/// The same matrix from 1D blocks: kron(M, K) + kron(K, M).
Eigen::MatrixXd stiffness_2d_kron(const Mesh2D& mesh);

/// mu_i = sum_j B_j (K^-1)_ji, so that int grad mu_i . grad B_j = delta_ij.
class MuSet2D {
 public:
  explicit MuSet2D(Mesh2D mesh);

  const Mesh2D& mesh() const { return mesh_; }
  int size() const { return mesh_.num_interior(); }
  const Eigen::MatrixXd& stiffness() const { return k_; }
  const Eigen::MatrixXd& coefficients() const { return c_; }

  double value(int i, double x, double y) const;
  // int grad mu_i . grad B_j by tensor Gauss-Legendre
  Eigen::MatrixXd biorthogonality(int points = 12) const;

 private:
  Mesh2D mesh_;
  Eigen::MatrixXd k_;
  Eigen::MatrixXd c_;
};

Field2D project_2d(const MuSet2D& mu, const Function2D& phi, int points = 12);
Field2D project_2d_source(const MuSet2D& mu, const std::function<double(double, double)>& f, int points = 12);

struct FineScale2DConfig {
  int num_terms = kDefaultSeriesTerms;
  int cell_points = 10;     // Gauss points per sub-cell
  double max_phase = 4.0;   // sub-cells keep n pi h below this
  int scan_points = 6;      // Gauss points per convolution cell
};

struct Reconstruction2D {
  std::vector<double> xs, ys;
  Eigen::MatrixXd u_prime;  // (ix, iy)
  Eigen::VectorXd mu_g_r;   // mu G R
  Eigen::VectorXd weights;  // [mu G mu^T]^-1 mu G R
};

/// Fine scales of the H10 projection for -lap u = f on the unit square,
///   u' = G R - G mu^T [mu G mu^T]^-1 mu G R,   R = f + lap u_bar,
/// with G the sine series truncated after num_terms x-modes.  Each mode is
/// the 1D kernel of -v'' + (n pi)^2 v, applied by exponential scans.
class FineScale2D {
 public:
  FineScale2D(const MuSet2D& mu, FineScale2DConfig cfg = {});

  const MuSet2D& mu() const { return mu_; }
  // mu G mu^T
  const Eigen::MatrixXd& mu_g_mu() const { return a_; }
  // <-lap B_k, G (-lap B_l)>
  const Eigen::MatrixXd& basis_pairing() const { return ab_; }

  Reconstruction2D reconstruct(const Separable2D& f, const Field2D& u_bar, std::span<const double> xs,
                               std::span<const double> ys) const;

  // H10 projection coefficients of G'(-lap mu_i) for every i, as columns.
  Eigen::MatrixXd annihilation() const;

 private:
  struct Setup;
  struct Solved;
  Solved evaluate(const Separable2D& f, const Field2D* u_bar, std::span<const double> ys) const;

  const MuSet2D& mu_;
  FineScale2DConfig cfg_;
  Eigen::MatrixXd ab_;
  Eigen::MatrixXd a_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Mode-space helper exposed for testing: (G_kappa d)(y) for a 1D
/// distribution d without dipoles, at the sorted points ys (which must
/// contain every breakpoint and mass location of d).
std::vector<double> mode_convolve(double kappa, const Distribution& d, std::span<const double> ys,
                                  int scan_points = 6);

}  // namespace fsg
