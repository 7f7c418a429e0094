#pragma once

#include <optional>

#include <Eigen/Dense>

#include "fsg/basis.hpp"
#include "fsg/distribution.hpp"
#include "fsg/dualspace.hpp"
#include "fsg/quadrature.hpp"

namespace fsg {

enum class Flavor { L2, H10 };

const char* flavor_name(Flavor f);

/// K_jk = int psi_j' psi_k' over interior nodal functions.
class StiffnessMatrix {
 public:
  explicit StiffnessMatrix(const BasisFamily& family);

  const Eigen::MatrixXd& entries() const { return k_; }
  int size() const { return static_cast<int>(k_.rows()); }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  Eigen::MatrixXd k_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// The functionals mu_i whose pairings give projection coefficients.
///
/// L2:  mu_i = dual nodal function, paired by int mu_i f, target = edge space.
/// H10: mu_i = sum_j psi_j (K^-1)_ji over interior nodes, paired by
///      int mu_i' f', target = nodal space with zero boundary values.
class MuSet {
 public:
  MuSet(BasisFamily family, Flavor flavor);

  Flavor flavor() const { return flavor_; }
  const BasisFamily& family() const { return family_; }
  int size() const { return static_cast<int>(coef_.cols()); }
  // Rows: edge dofs (L2) or interior nodal dofs (H10).
  const Eigen::MatrixXd& coefficients() const { return coef_; }
  Space target_space() const { return flavor_ == Flavor::L2 ? Space::Edge : Space::Nodal; }
  // Global primal dof paired with mu_i.
  int target_index(int i) const { return flavor_ == Flavor::L2 ? i : i + 1; }
  const StiffnessMatrix* stiffness() const { return stiffness_ ? &*stiffness_ : nullptr; }

  double value(int i, double x) const;
  double deriv(int i, double x) const;
  void values_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out) const;
  void derivs_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out) const;
  void seconds_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out) const;
  // d^order mu_i / dx^order using the polynomial of element e.
  double component_in(int i, int e, double x, int order) const;

  // Resolved basis function paired with mu_i.
  double resolved(int i, double x) const;
  double resolved_in(int i, int e, double x) const;

  /// mu_i as a distribution acting through the L2 duality, i.e. the
  /// density rho with <rho, w> equal to the flavor pairing of mu_i with w
  /// for every w vanishing at the mesh ends.  For H10 this is -mu_i''
  /// including the point masses from the slope jumps at interfaces.
  Distribution functional(int i) const;

 private:
  void combine_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out, int order) const;

  BasisFamily family_;
  Flavor flavor_;
  Eigen::MatrixXd coef_;
  std::optional<StiffnessMatrix> stiffness_;
};

/// Flavor pairing of every mu_i with f: int mu_i f (L2) or int mu_i' f' (H10).
/// A missing derivative is replaced by central differences.
Eigen::VectorXd pair(const MuSet& mu, const Function1D& f, const QuadratureRule& rule);
/// int mu_i f for every i, whatever the flavor.
Eigen::VectorXd pair_l2(const MuSet& mu, const Function1D& f, const QuadratureRule& rule);

Field project(const MuSet& mu, const Function1D& f, const QuadratureRule& rule);
Field project(const MuSet& mu, const Function1D& f);

/// H10 projection of the solution of -u'' = f, u(a) = u(b) = 0.
Field h10_project_from_source(const MuSet& mu, const Function1D& f, const QuadratureRule& rule);
Field h10_project_from_source(const MuSet& mu, const Function1D& f);

/// Expands projection coefficients into a field of the target space.
Field to_field(const MuSet& mu, const Eigen::VectorXd& coeffs);

}  // namespace fsg
