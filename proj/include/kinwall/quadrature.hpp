#pragma once

#include <functional>
#include <vector>

namespace kinwall {

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1,1)
  std::vector<double> weights;  // sum = 2
};

// Nodes/weights for n-point Gauss-Legendre, cached per n.
const GaussLegendre& gauss_legendre(int n);

// fixed-order GL on [a,b]
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int order);

struct QuadResult {
  double value;
  double est_error;  // |last refinement step|
};

// Panel doubling until two successive refinements agree to rel_tol (or
// max_level); returns the finer value and the last inter-level difference.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double rel_tol, int base_panels = 4,
                              int order = 16, int max_level = 8);

}  // namespace kinwall
