#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace graphfuse {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadResult {
  std::vector<double> value;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Fills out[0..dim) with the integrand at x.
using VectorIntegrand = std::function<void(double x, std::vector<double>& out)>;

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

// Adaptive Gauss-Kronrod (7/15) on [a,b]; error is the max-norm over components.
QuadResult integrate(const VectorIntegrand& f, double a, double b, std::size_t dim, const QuadOptions& opt = {});

// Integral over [a, inf) through t = a + scale * x / (1 - x).
QuadResult integrate_to_infinity(const VectorIntegrand& f, double a, double scale, std::size_t dim,
                                 const QuadOptions& opt = {});

double integrate_scalar(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt = {});

}  // namespace graphfuse
