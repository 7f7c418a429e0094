#include "fsg/projection.hpp"

#include <array>
#include <cmath>

#include "fsg/errors.hpp"

namespace fsg {

namespace {

constexpr double kFiniteDiffStep = 1e-6;
constexpr double kBoundaryTol = 1e-10;

std::function<double(double)> derivative_of(const Function1D& f) {
  if (f.derivative) return f.derivative;
  if (!f.value) throw InputError("function has no value evaluator");
  return [v = f.value](double x) {
    return (v(x + kFiniteDiffStep) - v(x - kFiniteDiffStep)) / (2.0 * kFiniteDiffStep);
  };
}

std::vector<double> sorted_cuts(const Function1D& f) {
  std::vector<double> c = f.breakpoints;
  std::sort(c.begin(), c.end());
  return c;
}

}  // namespace

const char* flavor_name(Flavor f) { return f == Flavor::L2 ? "l2" : "h10"; }

StiffnessMatrix::StiffnessMatrix(const BasisFamily& family) {
  const Mesh1D& mesh = family.mesh();
  const int p = mesh.degree();
  const int n = mesh.num_nodal_dofs() - 2;
  if (n < 1) throw InputError("stiffness: need at least one interior node");
  k_ = Eigen::MatrixXd::Zero(n, n);
  const QuadratureRule rule = QuadratureRule::gauss_legendre(p + 1);
  std::array<double, 65> d{};
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double jac = mesh.jacobian(e);
    for (int q = 0; q < rule.size(); ++q) {
      family.ref_nodal_deriv(rule.nodes()[q], d);
      const double scale = rule.weights()[q] / jac;
      for (int a = 0; a <= p; ++a) {
        const int ga = e * p + a - 1;
        if (ga < 0 || ga >= n) continue;
        for (int b = 0; b <= p; ++b) {
          const int gb = e * p + b - 1;
          if (gb < 0 || gb >= n) continue;
          k_(ga, gb) += scale * d[a] * d[b];
        }
      }
    }
  }
  llt_.compute(k_);
  if (llt_.info() != Eigen::Success) throw NumericalDefect("stiffness matrix is not positive definite");
}

Eigen::VectorXd StiffnessMatrix::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != k_.rows()) throw InputError("stiffness solve: dimension mismatch");
  return llt_.solve(rhs);
}

Eigen::MatrixXd StiffnessMatrix::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != k_.rows()) throw InputError("stiffness solve: dimension mismatch");
  return llt_.solve(rhs);
}

MuSet::MuSet(BasisFamily family, Flavor flavor) : family_(std::move(family)), flavor_(flavor) {
  if (flavor_ == Flavor::L2) {
    coef_ = DualSet(family_, DualKind::DualNodal).coefficients();
  } else {
    stiffness_.emplace(family_);
    const int n = stiffness_->size();
    coef_ = stiffness_->solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n)));
  }
}

void MuSet::combine_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out, int order) const {
  const int p = family_.degree();
  const double jac = family_.mesh().jacobian(e);
  const double xi = family_.mesh().to_reference(e, x);
  std::array<double, 65> v{};
  out.setZero();
  if (flavor_ == Flavor::L2) {
    if (order == 0) {
      family_.ref_edge(xi, v);
    } else if (order == 1) {
      family_.ref_nodal_second(xi, v);
      double acc = 0.0;
      for (int m = 0; m < p; ++m) {
        acc -= v[m];
        v[m] = acc;
      }
    } else {
      throw InputError("L2 mu functions: second derivative not available");
    }
    const double scale = 1.0 / std::pow(jac, order + 1);
    for (int m = 0; m < p; ++m) out += (scale * v[m]) * coef_.row(e * p + m).transpose();
    return;
  }
  if (order == 0) family_.ref_nodal(xi, v);
  else if (order == 1) family_.ref_nodal_deriv(xi, v);
  else family_.ref_nodal_second(xi, v);
  const double scale = 1.0 / std::pow(jac, order);
  const int n = static_cast<int>(coef_.rows());
  for (int l = 0; l <= p; ++l) {
    const int g = e * p + l - 1;
    if (g < 0 || g >= n) continue;
    out += (scale * v[l]) * coef_.row(g).transpose();
  }
}

double MuSet::component_in(int i, int e, double x, int order) const {
  const int p = family_.degree();
  const double jac = family_.mesh().jacobian(e);
  const double xi = family_.mesh().to_reference(e, x);
  std::array<double, 65> v{};
  double s = 0.0;
  if (flavor_ == Flavor::L2) {
    if (order == 0) {
      family_.ref_edge(xi, v);
    } else if (order == 1) {
      family_.ref_nodal_second(xi, v);
      double acc = 0.0;
      for (int m = 0; m < p; ++m) {
        acc -= v[m];
        v[m] = acc;
      }
    } else {
      throw InputError("L2 mu functions: second derivative not available");
    }
    for (int m = 0; m < p; ++m) s += v[m] * coef_(e * p + m, i);
    return s / std::pow(jac, order + 1);
  }
  if (order == 0) family_.ref_nodal(xi, v);
  else if (order == 1) family_.ref_nodal_deriv(xi, v);
  else family_.ref_nodal_second(xi, v);
  const int n = static_cast<int>(coef_.rows());
  for (int l = 0; l <= p; ++l) {
    const int g = e * p + l - 1;
    if (g >= 0 && g < n) s += v[l] * coef_(g, i);
  }
  return s / std::pow(jac, order);
}

void MuSet::values_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out) const { combine_in(e, x, out, 0); }
void MuSet::derivs_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out) const { combine_in(e, x, out, 1); }
void MuSet::seconds_in(int e, double x, Eigen::Ref<Eigen::VectorXd> out) const { combine_in(e, x, out, 2); }

double MuSet::value(int i, double x) const {
  if (i < 0 || i >= size()) throw InputError("mu index out of range");
  return component_in(i, family_.mesh().locate(x), x, 0);
}

double MuSet::deriv(int i, double x) const {
  if (i < 0 || i >= size()) throw InputError("mu index out of range");
  return component_in(i, family_.mesh().locate(x), x, 1);
}

double MuSet::resolved_in(int i, int e, double x) const {
  return flavor_ == Flavor::L2 ? family_.edge_in(e, i, x) : family_.nodal_in(e, i + 1, x);
}

double MuSet::resolved(int i, double x) const { return resolved_in(i, family_.mesh().locate(x), x); }

Distribution MuSet::functional(int i) const {
  if (i < 0 || i >= size()) throw InputError("mu index out of range");
  const Mesh1D& mesh = family_.mesh();
  Distribution d;
  d.breakpoints.assign(mesh.boundaries().begin(), mesh.boundaries().end());
  const MuSet self = *this;
  if (flavor_ == Flavor::L2) {
    d.density = [self, i](double x) { return self.component_in(i, self.family().mesh().locate(x), x, 0); };
    return d;
  }
  d.density = [self, i](double x) { return -self.component_in(i, self.family().mesh().locate(x), x, 2); };
  // Slope jumps at interior interfaces.  The masses at the two ends only
  // ever meet functions that vanish there and are left out.
  Eigen::VectorXd left(size()), right(size());
  for (int k = 1; k < mesh.num_elements(); ++k) {
    const double x = mesh.boundaries()[k];
    derivs_in(k - 1, x, left);
    derivs_in(k, x, right);
    const double w = left[i] - right[i];
    if (w != 0.0) d.masses.push_back({x, w});
  }
  return d;
}

Eigen::VectorXd pair(const MuSet& mu, const Function1D& f, const QuadratureRule& rule) {
  if (mu.flavor() == Flavor::L2) return pair_l2(mu, f, rule);
  const auto fd = derivative_of(f);
  const std::vector<double> cuts = sorted_cuts(f);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mu.size());
  Eigen::VectorXd d(mu.size());
  for_each_quad_point(mu.family().mesh(), rule, cuts, [&](int e, double x, double w) {
    mu.derivs_in(e, x, d);
    acc += (w * fd(x)) * d;
  });
  return acc;
}

Eigen::VectorXd pair_l2(const MuSet& mu, const Function1D& f, const QuadratureRule& rule) {
  if (!f.value) throw InputError("function has no value evaluator");
  const std::vector<double> cuts = sorted_cuts(f);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mu.size());
  Eigen::VectorXd v(mu.size());
  for_each_quad_point(mu.family().mesh(), rule, cuts, [&](int e, double x, double w) {
    mu.values_in(e, x, v);
    acc += (w * f.value(x)) * v;
  });
  return acc;
}

Field to_field(const MuSet& mu, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != mu.size()) throw InputError("to_field: coefficient length mismatch");
  Field out;
  out.space = mu.target_space();
  if (mu.flavor() == Flavor::L2) {
    out.coeffs = coeffs;
  } else {
    out.coeffs = Eigen::VectorXd::Zero(mu.size() + 2);
    out.coeffs.segment(1, mu.size()) = coeffs;
  }
  return out;
}

Field project(const MuSet& mu, const Function1D& f, const QuadratureRule& rule) {
  if (mu.flavor() == Flavor::H10) {
    const Mesh1D& mesh = mu.family().mesh();
    if (!f.value) throw InputError("function has no value evaluator");
    const double fa = f.value(mesh.a()), fb = f.value(mesh.b());
    if (std::abs(fa) > kBoundaryTol || std::abs(fb) > kBoundaryTol)
      throw InputError("H10 projection needs a function vanishing at both ends");
  }
  return to_field(mu, pair(mu, f, rule));
}

Field project(const MuSet& mu, const Function1D& f) {
  return project(mu, f, QuadratureRule::gauss_legendre(kDefaultQuadPoints));
}

Field h10_project_from_source(const MuSet& mu, const Function1D& f, const QuadratureRule& rule) {
  if (mu.flavor() != Flavor::H10) throw InputError("source projection needs the H10 flavor");
  return to_field(mu, pair_l2(mu, f, rule));
}

Field h10_project_from_source(const MuSet& mu, const Function1D& f) {
  return h10_project_from_source(mu, f, QuadratureRule::gauss_legendre(kDefaultQuadPoints));
}

}  // namespace fsg
