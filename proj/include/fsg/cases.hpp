#pragma once

#include <string>
#include <vector>

#include "fsg/advdiff.hpp"
#include "fsg/poisson2d.hpp"

namespace fsg {

/// -u'' = f on [0, 1] with a known solution.
struct PoissonCase1D {
  std::string name;
  Function1D solution;
  Function1D source;
};

/// -lap u = f on the unit square with a known solution.
struct PoissonCase2D {
  std::string name;
  Function2D solution;
  Separable2D source;
};

struct AdvDiffCase {
  std::string name;
  AdvDiffProblem problem;
  Function1D solution;
};

// u = sin(2 pi x), f = 4 pi^2 sin(2 pi x)
PoissonCase1D sin2pix();
// f = 1 with its closed-form solution
AdvDiffCase advdiff_const(double c, double nu);
// u = sin(2 pi x) sin(2 pi y), f = 8 pi^2 sin(2 pi x) sin(2 pi y)
PoissonCase2D sin2pixy();

std::vector<std::string> case_names();

}  // namespace fsg
