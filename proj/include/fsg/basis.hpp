#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fsg/quadrature.hpp"

namespace fsg {

class Mesh1D {
 public:
  Mesh1D(double a, double b, int num_elements, int degree);
  Mesh1D(std::vector<double> boundaries, int degree);

  double a() const { return x_.front(); }
  double b() const { return x_.back(); }
  int num_elements() const { return static_cast<int>(x_.size()) - 1; }
  int degree() const { return p_; }
  std::span<const double> boundaries() const { return x_; }

  double left(int e) const { return x_[e]; }
  double right(int e) const { return x_[e + 1]; }
  double width(int e) const { return x_[e + 1] - x_[e]; }
  double jacobian(int e) const { return 0.5 * width(e); }

  // Element containing x; a point on an interior boundary goes left.
  int locate(double x) const;
  double to_reference(int e, double x) const;
  double to_physical(int e, double xi) const;

  int num_nodal_dofs() const { return num_elements() * p_ + 1; }
  int num_edge_dofs() const { return num_elements() * p_; }

 private:
  std::vector<double> x_;
  int p_;
};

// Edge dof k (0-based) is the histopolant attached to the subinterval
// between global nodes k and k+1.
enum class Space { Nodal, Edge, DualNodal, DualEdge };

struct Field {
  Space space = Space::Nodal;
  Eigen::VectorXd coeffs;
};

class BasisFamily {
 public:
  explicit BasisFamily(Mesh1D mesh);

  const Mesh1D& mesh() const { return mesh_; }
  int degree() const { return mesh_.degree(); }
  std::span<const double> reference_nodes() const { return nodes_; }
  // Physical coordinates of all global nodes.
  std::vector<double> global_nodes() const;

  // Reference element, all local functions at once.
  void ref_nodal(double xi, std::span<double> out) const;         // p+1
  void ref_nodal_deriv(double xi, std::span<double> out) const;   // d/dxi
  void ref_nodal_second(double xi, std::span<double> out) const;  // d2/dxi2
  void ref_edge(double xi, std::span<double> out) const;          // p

  double nodal(int i, double x) const;
  double nodal_deriv(int i, double x) const;
  double edge(int k, double x) const;

  // Element-aware versions: x is evaluated with the polynomial of element e,
  // which fixes one-sided limits at interfaces.
  double nodal_in(int e, int i, double x) const;
  double nodal_deriv_in(int e, int i, double x) const;
  double nodal_second_in(int e, int i, double x) const;
  double edge_in(int e, int k, double x) const;

  double eval(const Field& f, double x) const;
  double eval_deriv(const Field& f, double x) const;
  double eval_in(const Field& f, int e, double x) const;
  double eval_deriv_in(const Field& f, int e, double x) const;
  double eval_second_in(const Field& f, int e, double x) const;

  int space_size(Space s) const;

 private:
  void check_field(const Field& f) const;

  Mesh1D mesh_;
  std::vector<double> nodes_;
  std::vector<double> bary_;
  Eigen::MatrixXd d1_;  // d1_(k,j) = psi_j'(xi_k)
  Eigen::MatrixXd d2_;
};

// Integrates f(e, x) element by element, additionally splitting each element
// at the members of `cuts` that fall strictly inside it.  `cuts` must be
// sorted.
template <class F>
double integrate_elements(const Mesh1D& mesh, const QuadratureRule& rule,
                          std::span<const double> cuts, F&& f) {
  double total = 0.0;
  std::vector<double> local;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double lo = mesh.left(e), hi = mesh.right(e);
    local.clear();
    for (double c : cuts)
      if (c > lo && c < hi && (local.empty() || c > local.back())) local.push_back(c);
    total += integrate_split([&](double x) { return f(e, x); }, lo, hi, local, rule);
  }
  return total;
}

// Calls visit(e, x, w) for every quadrature point of the composite rule
// that integrate_elements would use.
template <class V>
void for_each_quad_point(const Mesh1D& mesh, const QuadratureRule& rule,
                         std::span<const double> cuts, V&& visit) {
  std::vector<double> pts;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double lo = mesh.left(e), hi = mesh.right(e);
    pts.assign(1, lo);
    for (double c : cuts)
      if (c > lo && c < hi && c > pts.back()) pts.push_back(c);
    pts.push_back(hi);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const double half = 0.5 * (pts[k + 1] - pts[k]);
      const double mid = 0.5 * (pts[k + 1] + pts[k]);
      for (int q = 0; q < rule.size(); ++q)
        visit(e, mid + half * rule.nodes()[q], half * rule.weights()[q]);
    }
  }
}

}  // namespace fsg
