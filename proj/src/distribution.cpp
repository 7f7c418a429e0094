#include "fsg/distribution.hpp"

#include <algorithm>

#include "fsg/errors.hpp"

namespace fsg {

namespace {

// Value at mesh boundary k seen from element e.
double node_or_eval(const BasisFamily& family, const Field& v, int e, int k, double x) {
  if (v.space == Space::Nodal) return v.coeffs[k * family.degree()];
  return family.eval_in(v, e, x);
}

}  // namespace

Distribution from_function(const Function1D& f) {
  Distribution d;
  d.density = f.value;
  d.breakpoints = f.breakpoints;
  std::sort(d.breakpoints.begin(), d.breakpoints.end());
  return d;
}

Distribution operator+(const Distribution& a, const Distribution& b) {
  Distribution out;
  if (a.density && b.density) {
    out.density = [da = a.density, db = b.density](double x) { return da(x) + db(x); };
  } else {
    out.density = a.density ? a.density : b.density;
  }
  out.breakpoints = a.breakpoints;
  out.breakpoints.insert(out.breakpoints.end(), b.breakpoints.begin(), b.breakpoints.end());
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.breakpoints.erase(std::unique(out.breakpoints.begin(), out.breakpoints.end()),
                        out.breakpoints.end());
  out.masses = a.masses;
  out.masses.insert(out.masses.end(), b.masses.begin(), b.masses.end());
  out.dipoles = a.dipoles;
  out.dipoles.insert(out.dipoles.end(), b.dipoles.begin(), b.dipoles.end());
  return out;
}

Distribution scaled(const Distribution& d, double factor) {
  Distribution out = d;
  if (d.density) out.density = [f = d.density, factor](double x) { return factor * f(x); };
  for (auto& m : out.masses) m.weight *= factor;
  for (auto& m : out.dipoles) m.weight *= factor;
  return out;
}

Distribution second_derivative(const BasisFamily& family, const Field& v) {
  if (v.space != Space::Nodal && v.space != Space::Edge)
    throw InputError("second_derivative: primal field required");
  const Mesh1D& mesh = family.mesh();
  Distribution d;
  if (v.space == Space::Nodal) {
    d.density = [family, v](double x) {
      return family.eval_second_in(v, family.mesh().locate(x), x);
    };
  } else {
    d.density = [family, v](double x) {
      return family.eval_deriv_in(v, family.mesh().locate(x), x);
    };
  }
  d.breakpoints.assign(mesh.boundaries().begin(), mesh.boundaries().end());
  const int n = mesh.num_elements();
  for (int k = 0; k <= n; ++k) {
    const double x = mesh.boundaries()[k];
    // one-sided values, zero outside the mesh
    const double dl = k > 0 ? family.eval_deriv_in(v, k - 1, x) : 0.0;
    const double dr = k < n ? family.eval_deriv_in(v, k, x) : 0.0;
    if (dr != dl) d.masses.push_back({x, dr - dl});
    // nodal fields are continuous: only the ends can jump, by the end coefficient
    const double vl = k > 0 ? node_or_eval(family, v, k - 1, k, x) : 0.0;
    const double vr = k < n ? node_or_eval(family, v, k, k, x) : 0.0;
    if (vr != vl) d.dipoles.push_back({x, vr - vl});
  }
  return d;
}

Distribution first_derivative(const BasisFamily& family, const Field& v) {
  const Mesh1D& mesh = family.mesh();
  Distribution d;
  d.density = [family, v](double x) { return family.eval_deriv_in(v, family.mesh().locate(x), x); };
  d.breakpoints.assign(mesh.boundaries().begin(), mesh.boundaries().end());
  const int n = mesh.num_elements();
  for (int k = 0; k <= n; ++k) {
    const double x = mesh.boundaries()[k];
    const double vl = k > 0 ? node_or_eval(family, v, k - 1, k, x) : 0.0;
    const double vr = k < n ? node_or_eval(family, v, k, k, x) : 0.0;
    if (vr != vl) d.masses.push_back({x, vr - vl});
  }
  return d;
}

}  // namespace fsg
