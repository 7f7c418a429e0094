#include "fsg/basis.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "fsg/errors.hpp"
#include "fsg/quadrature.hpp"

namespace fsg {

namespace {

constexpr int kMaxDegree = 64;
using Scratch = std::array<double, kMaxDegree + 1>;

std::vector<double> uniform_boundaries(double a, double b, int n) {
  if (n < 1) throw InputError("Mesh1D: need at least one element");
  if (!(a < b)) throw InputError("Mesh1D: need a < b");
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = a + (b - a) * i / n;
  x[n] = b;
  return x;
}

}  // namespace

Mesh1D::Mesh1D(double a, double b, int num_elements, int degree)
    : Mesh1D(uniform_boundaries(a, b, num_elements), degree) {}

Mesh1D::Mesh1D(std::vector<double> boundaries, int degree) : x_(std::move(boundaries)), p_(degree) {
  if (p_ < 1 || p_ > kMaxDegree) throw InputError("Mesh1D: degree must be in 1..64");
  if (x_.size() < 2) throw InputError("Mesh1D: need at least one element");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw InputError("Mesh1D: boundaries must be strictly increasing");
}

int Mesh1D::locate(double x) const {
  if (!(x >= a() && x <= b())) throw InputError("point " + std::to_string(x) + " outside mesh");
  // first boundary >= x, then step back so that boundary points go left
  auto it = std::lower_bound(x_.begin() + 1, x_.end() - 1, x);
  return static_cast<int>(it - x_.begin()) - 1;
}

double Mesh1D::to_reference(int e, double x) const {
  return (2.0 * x - x_[e] - x_[e + 1]) / (x_[e + 1] - x_[e]);
}

double Mesh1D::to_physical(int e, double xi) const {
  return 0.5 * (x_[e] + x_[e + 1]) + 0.5 * (x_[e + 1] - x_[e]) * xi;
}

BasisFamily::BasisFamily(Mesh1D mesh) : mesh_(std::move(mesh)), nodes_(gll_nodes(mesh_.degree())) {
  const int n = degree() + 1;
  bary_.assign(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) bary_[j] /= (nodes_[j] - nodes_[k]);
  d1_ = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      d1_(k, j) = (bary_[j] / bary_[k]) / (nodes_[k] - nodes_[j]);
      diag -= d1_(k, j);
    }
    d1_(k, k) = diag;
  }
  d2_ = d1_ * d1_;
}

std::vector<double> BasisFamily::global_nodes() const {
  const int p = degree();
  std::vector<double> x(mesh_.num_nodal_dofs());
  for (int e = 0; e < mesh_.num_elements(); ++e)
    for (int j = 0; j < p; ++j) x[e * p + j] = mesh_.to_physical(e, nodes_[j]);
  x.back() = mesh_.b();
  for (int e = 0; e < mesh_.num_elements(); ++e) x[e * p] = mesh_.left(e);
  return x;
}

void BasisFamily::ref_nodal(double xi, std::span<double> out) const {
  const int n = degree() + 1;
  for (int j = 0; j < n; ++j) {
    if (xi == nodes_[j]) {
      std::fill(out.begin(), out.begin() + n, 0.0);
      out[j] = 1.0;
      return;
    }
  }
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    out[j] = bary_[j] / (xi - nodes_[j]);
    sum += out[j];
  }
  for (int j = 0; j < n; ++j) out[j] /= sum;
}

void BasisFamily::ref_nodal_deriv(double xi, std::span<double> out) const {
  const int n = degree() + 1;
  Scratch v;
  ref_nodal(xi, v);
  // psi_j' is a polynomial of degree p-1, so interpolating its nodal values
  // is exact.
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += v[k] * d1_(k, j);
    out[j] = s;
  }
}

void BasisFamily::ref_nodal_second(double xi, std::span<double> out) const {
  const int n = degree() + 1;
  Scratch v;
  ref_nodal(xi, v);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += v[k] * d2_(k, j);
    out[j] = s;
  }
}

void BasisFamily::ref_edge(double xi, std::span<double> out) const {
  const int p = degree();
  Scratch d;
  ref_nodal_deriv(xi, d);
  double acc = 0.0;
  for (int m = 0; m < p; ++m) {
    acc -= d[m];
    out[m] = acc;
  }
}

double BasisFamily::nodal_in(int e, int i, double x) const {
  const int j = i - e * degree();
  if (j < 0 || j > degree()) return 0.0;
  Scratch v;
  ref_nodal(mesh_.to_reference(e, x), v);
  return v[j];
}

double BasisFamily::nodal_deriv_in(int e, int i, double x) const {
  const int j = i - e * degree();
  if (j < 0 || j > degree()) return 0.0;
  Scratch v;
  ref_nodal_deriv(mesh_.to_reference(e, x), v);
  return v[j] / mesh_.jacobian(e);
}

double BasisFamily::nodal_second_in(int e, int i, double x) const {
  const int j = i - e * degree();
  if (j < 0 || j > degree()) return 0.0;
  Scratch v;
  ref_nodal_second(mesh_.to_reference(e, x), v);
  const double jac = mesh_.jacobian(e);
  return v[j] / (jac * jac);
}

double BasisFamily::edge_in(int e, int k, double x) const {
  const int m = k - e * degree();
  if (m < 0 || m >= degree()) return 0.0;
  Scratch v;
  ref_edge(mesh_.to_reference(e, x), v);
  return v[m] / mesh_.jacobian(e);
}

double BasisFamily::nodal(int i, double x) const {
  if (i < 0 || i >= mesh_.num_nodal_dofs()) throw InputError("nodal: index out of range");
  return nodal_in(mesh_.locate(x), i, x);
}

double BasisFamily::nodal_deriv(int i, double x) const {
  if (i < 0 || i >= mesh_.num_nodal_dofs()) throw InputError("nodal_deriv: index out of range");
  return nodal_deriv_in(mesh_.locate(x), i, x);
}

double BasisFamily::edge(int k, double x) const {
  if (k < 0 || k >= mesh_.num_edge_dofs()) throw InputError("edge: index out of range");
  return edge_in(mesh_.locate(x), k, x);
}

int BasisFamily::space_size(Space s) const {
  return (s == Space::Nodal || s == Space::DualEdge) ? mesh_.num_nodal_dofs() : mesh_.num_edge_dofs();
}

void BasisFamily::check_field(const Field& f) const {
  if (f.space != Space::Nodal && f.space != Space::Edge)
    throw InputError("field evaluation needs a primal (nodal or edge) field");
  if (f.coeffs.size() != space_size(f.space)) throw InputError("field: coefficient length mismatch");
}

double BasisFamily::eval_in(const Field& f, int e, double x) const {
  check_field(f);
  const int p = degree();
  Scratch v;
  const double xi = mesh_.to_reference(e, x);
  double s = 0.0;
  if (f.space == Space::Nodal) {
    ref_nodal(xi, v);
    for (int j = 0; j <= p; ++j) s += f.coeffs[e * p + j] * v[j];
    return s;
  }
  ref_edge(xi, v);
  for (int j = 0; j < p; ++j) s += f.coeffs[e * p + j] * v[j];
  return s / mesh_.jacobian(e);
}

double BasisFamily::eval_deriv_in(const Field& f, int e, double x) const {
  check_field(f);
  const int p = degree();
  Scratch v;
  const double xi = mesh_.to_reference(e, x);
  const double jac = mesh_.jacobian(e);
  double s = 0.0;
  if (f.space == Space::Nodal) {
    ref_nodal_deriv(xi, v);
    for (int j = 0; j <= p; ++j) s += f.coeffs[e * p + j] * v[j];
    return s / jac;
  }
  // derivative of an edge field, via d/dxi of -sum psi_k'
  ref_nodal_second(xi, v);
  double acc = 0.0;
  for (int m = 0; m < p; ++m) {
    acc -= v[m];
    s += f.coeffs[e * p + m] * acc;
  }
  return s / (jac * jac);
}

double BasisFamily::eval_second_in(const Field& f, int e, double x) const {
  check_field(f);
  if (f.space != Space::Nodal) throw InputError("second derivative only for nodal fields");
  const int p = degree();
  Scratch v;
  ref_nodal_second(mesh_.to_reference(e, x), v);
  const double jac = mesh_.jacobian(e);
  double s = 0.0;
  for (int j = 0; j <= p; ++j) s += f.coeffs[e * p + j] * v[j];
  return s / (jac * jac);
}

double BasisFamily::eval(const Field& f, double x) const { return eval_in(f, mesh_.locate(x), x); }

double BasisFamily::eval_deriv(const Field& f, double x) const {
  return eval_deriv_in(f, mesh_.locate(x), x);
}

}  // namespace fsg
