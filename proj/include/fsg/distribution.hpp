#pragma once

#include <functional>
#include <vector>

#include "fsg/basis.hpp"

namespace fsg {

/// A function with optional analytic derivative and a list of points where
/// it (or its derivative) is not smooth.
struct Function1D {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::vector<double> breakpoints;
};

struct PointMass {
  double at;
  double weight;
};

// weight * delta'(x - at)
struct Dipole {
  double at;
  double weight;
};

/// Density plus point masses and dipoles.  Residuals of discrete fields
/// are of this form once jumps in the field and its derivative are kept.
struct Distribution {
  std::function<double(double)> density;  // empty means zero
  std::vector<double> breakpoints;        // sorted
  std::vector<PointMass> masses;
  std::vector<Dipole> dipoles;

  double density_at(double x) const { return density ? density(x) : 0.0; }
  bool has_density() const { return static_cast<bool>(density); }
};

Distribution from_function(const Function1D& f);
Distribution operator+(const Distribution& a, const Distribution& b);
Distribution scaled(const Distribution& d, double factor);

/// Distributional second derivative of a nodal or edge field extended by
/// zero outside the mesh.
Distribution second_derivative(const BasisFamily& family, const Field& v);

/// Distributional first derivative of a nodal field extended by zero
/// (piecewise derivative plus masses for boundary jumps).
Distribution first_derivative(const BasisFamily& family, const Field& v);

}  // namespace fsg
