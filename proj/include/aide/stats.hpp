#pragma once
// Small statistics utilities used for reporting.

#include <utility>
#include <vector>

namespace aide::stats {

struct TTestResult {
  double t = 0.0;
  double p = 0.0;  // two-sided
};

// Paired two-sided t-test on the per-element differences. Throws when the
// lengths differ, n < 2, or the differences have zero variance.
TTestResult paired_t_test(const std::vector<double>& a,
                          const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b) via continued fraction.
double incomplete_beta(double a, double b, double x);

// Survival helper: two-sided p for a t statistic with df degrees.
double t_two_sided_p(double t, double df);

// Spearman rank correlation with midranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

}  // namespace aide::stats
