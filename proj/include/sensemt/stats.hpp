#pragma once

#include <cstddef>
#include <span>

namespace sensemt::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Pearson product-moment correlation with the t-test p-value.
/// Throws Error on length mismatch, n < 3, or a constant input.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

}  // namespace sensemt::stats
