#pragma once

#include <cstddef>
#include <vector>

namespace speccam {

// Regularized incomplete beta I_x(a, b), relative accuracy ~1e-10
// (continued fraction, Lentz's method).
double incomplete_beta(double a, double b, double x);

// Two-tailed Student-t CDF helpers.
double t_cdf(double t, double dof);
double t_two_tailed_p(double t, double dof);

// Upper quantile t such that P(T <= t) = p, by bisection on t_cdf.
double t_quantile(double p, double dof);

double sample_mean(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);  // n-1 denominator

}  // namespace speccam
