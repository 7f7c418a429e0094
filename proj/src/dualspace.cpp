#include "fsg/dualspace.hpp"

#include <array>

#include "fsg/errors.hpp"
#include "fsg/quadrature.hpp"

namespace fsg {

MassMatrix::MassMatrix(const BasisFamily& family, MassKind kind) : kind_(kind) {
  const Mesh1D& mesh = family.mesh();
  const int p = mesh.degree();
  const int n = kind == MassKind::Nodal ? mesh.num_nodal_dofs() : mesh.num_edge_dofs();
  const int local = kind == MassKind::Nodal ? p + 1 : p;
  m_ = Eigen::MatrixXd::Zero(n, n);
  const QuadratureRule rule = QuadratureRule::gauss_legendre(p + 2);
  std::array<double, 65> v{};
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double jac = mesh.jacobian(e);
    for (int q = 0; q < rule.size(); ++q) {
      const double xi = rule.nodes()[q];
      double scale = rule.weights()[q] * jac;
      if (kind == MassKind::Nodal) {
        family.ref_nodal(xi, v);
      } else {
        family.ref_edge(xi, v);
        scale /= jac * jac;
      }
      for (int a = 0; a < local; ++a)
        for (int b = 0; b < local; ++b) m_(e * p + a, e * p + b) += scale * v[a] * v[b];
    }
  }
  llt_.compute(m_);
  if (llt_.info() != Eigen::Success) throw NumericalDefect("mass matrix is not positive definite");
}

Eigen::VectorXd MassMatrix::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != m_.rows()) throw InputError("mass solve: dimension mismatch");
  return llt_.solve(rhs);
}

Eigen::MatrixXd MassMatrix::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != m_.rows()) throw InputError("mass solve: dimension mismatch");
  return llt_.solve(rhs);
}

Eigen::VectorXd dual_dofs(const MassMatrix& mass, const Eigen::VectorXd& primal) {
  if (primal.size() != mass.size()) throw InputError("dual_dofs: dimension mismatch");
  return mass.entries() * primal;
}

Eigen::VectorXd primal_dofs(const MassMatrix& mass, const Eigen::VectorXd& dual) {
  return mass.solve(dual);
}

DualSet::DualSet(BasisFamily family, DualKind kind)
    : family_(std::move(family)),
      kind_(kind),
      mass_(family_, kind == DualKind::DualEdge ? MassKind::Nodal : MassKind::Edge) {
  coef_ = mass_.solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(mass_.size(), mass_.size())));
}

void DualSet::eval_all_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out) const {
  const int p = family_.degree();
  std::array<double, 65> v{};
  const double xi = family_.mesh().to_reference(e, x);
  int local = p + 1;
  double scale = 1.0;
  if (kind_ == DualKind::DualEdge) {
    family_.ref_nodal(xi, v);
  } else {
    family_.ref_edge(xi, v);
    local = p;
    scale = 1.0 / family_.mesh().jacobian(e);
  }
  out.setZero();
  for (int l = 0; l < local; ++l) out += (scale * v[l]) * coef_.row(e * p + l).transpose();
}

double DualSet::eval_in(int i, int e, double x) const {
  if (i < 0 || i >= size()) throw InputError("dual_eval: index out of range");
  const int p = family_.degree();
  std::array<double, 65> v{};
  const double xi = family_.mesh().to_reference(e, x);
  double s = 0.0;
  if (kind_ == DualKind::DualEdge) {
    family_.ref_nodal(xi, v);
    for (int l = 0; l <= p; ++l) s += v[l] * coef_(e * p + l, i);
    return s;
  }
  family_.ref_edge(xi, v);
  for (int l = 0; l < p; ++l) s += v[l] * coef_(e * p + l, i);
  return s / family_.mesh().jacobian(e);
}

double DualSet::eval(int i, double x) const { return eval_in(i, family_.mesh().locate(x), x); }

double DualSet::eval(const Field& f, double x) const {
  const Space expected = kind_ == DualKind::DualEdge ? Space::DualEdge : Space::DualNodal;
  if (f.space != expected) throw InputError("dual field evaluated with the wrong dual set");
  if (f.coeffs.size() != size()) throw InputError("dual field: coefficient length mismatch");
  const int e = family_.mesh().locate(x);
  Eigen::VectorXd all(size());
  eval_all_in(e, x, all);
  return f.coeffs.dot(all);
}

}  // namespace fsg
