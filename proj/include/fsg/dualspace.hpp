#pragma once

#include <Eigen/Dense>

#include "fsg/basis.hpp"

namespace fsg {

enum class MassKind { Nodal, Edge };

class MassMatrix {
 public:
  MassMatrix(const BasisFamily& family, MassKind kind);

  MassKind kind() const { return kind_; }
  const Eigen::MatrixXd& entries() const { return m_; }
  int size() const { return static_cast<int>(m_.rows()); }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  MassKind kind_;
  Eigen::MatrixXd m_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Dual degrees of freedom M v.
Eigen::VectorXd dual_dofs(const MassMatrix& mass, const Eigen::VectorXd& primal);
/// Inverse of dual_dofs through the factorization.
Eigen::VectorXd primal_dofs(const MassMatrix& mass, const Eigen::VectorXd& dual);

enum class DualKind {
  DualEdge,  // psi~(1) = psi(0) M0^-1
  DualNodal  // psi~(0) = psi(1) M1^-1
};

class DualSet {
 public:
  DualSet(BasisFamily family, DualKind kind);

  DualKind kind() const { return kind_; }
  const BasisFamily& family() const { return family_; }
  const MassMatrix& mass() const { return mass_; }
  int size() const { return mass_.size(); }
  // Column i holds the primal expansion of dual function i.
  const Eigen::MatrixXd& coefficients() const { return coef_; }

  double eval(int i, double x) const;
  double eval_in(int i, int e, double x) const;
  // All dual functions at x, evaluated with element e.
  void eval_all_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out) const;
  double eval(const Field& f, double x) const;

 private:
  BasisFamily family_;
  DualKind kind_;
  MassMatrix mass_;
  Eigen::MatrixXd coef_;
};

}  // namespace fsg
