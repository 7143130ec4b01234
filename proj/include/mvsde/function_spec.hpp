#pragma once

#include <string>
#include <vector>

namespace mvsde {

struct TrigTerm {
  double amplitude = 0.0;
  double frequency = 0.0;
};

// Scalar function with exact derivatives:
//   f(x) = sum_i poly[i] * x^i  +  sum_j amp_j * cos(freq_j * x)
// Coefficients are stored in ascending degree.
struct FunctionSpec {
  std::vector<double> poly;
  std::vector<TrigTerm> trig;
  std::string description;

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  // Highest degree with a nonzero coefficient, -1 if the polynomial part is 0.
  int degree() const;
  double leading_coeff() const;

  // Odd/even in the symbolic sense: the offending coefficients vanish and no
  // cosine term is present (cosines are even, so they never appear in an odd
  // function and always may in an even one).
  bool is_odd(double tol = 1e-12) const;
  bool is_even(double tol = 1e-12) const;

  bool is_constant(double tol = 1e-12) const;

  static FunctionSpec polynomial(std::vector<double> coeffs, std::string desc = {});
};

}  // namespace mvsde
