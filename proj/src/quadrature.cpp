#include "kinwall/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kinwall {

namespace {

GaussLegendre compute_gl(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre P_n(x) by recurrence
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int order) {
  const auto& gl = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < order; ++i)
    sum += gl.weights[i] * f(mid + half * gl.nodes[i]);
  return half * sum;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double rel_tol, int base_panels,
                              int order, int max_level) {
  if (!(b > a)) return {0.0, 0.0};
  auto panels_value = [&](int panels) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p)
      sum += integrate_gl(f, a + p * h, a + (p + 1) * h, order);
    return sum;
  };
  double prev = panels_value(base_panels);
  int panels = base_panels;
  for (int level = 0; level < max_level; ++level) {
    panels *= 2;
    const double cur = panels_value(panels);
    const double diff = std::fabs(cur - prev);
    if (diff <= rel_tol * std::max(std::fabs(cur), 1e-300))
      return {cur, diff};
    prev = cur;
  }
  return {prev, std::fabs(prev) * rel_tol * 10.0};
}

}  // namespace kinwall
