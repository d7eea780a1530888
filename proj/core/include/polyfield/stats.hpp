#pragma once

#include <vector>

namespace polyfield {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  long n = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

// Standard error of the mean of a correlated series via nonoverlapping batch
// means; nbatch around sqrt(n) is a reasonable default.
MeanSe batch_means(const std::vector<double>& xs, int nbatch = 0);

// Index of dispersion var/mean, for count data.
double dispersion(const std::vector<double>& counts);

// Two-sample Kolmogorov-Smirnov distance and the threshold it must stay below
// at significance alpha (asymptotic form c(alpha) sqrt((n+m)/(n m))).
double ks_statistic(std::vector<double> xs, std::vector<double> ys);
double ks_threshold(double alpha, std::size_t n, std::size_t m);

// Two-sample chi-square homogeneity test on matching histograms; bins with
// fewer than min_count entries combined are pooled.  Returns the p-value.
double chi_square_two_sample_p(const std::vector<long>& a, const std::vector<long>& b,
                               long min_count = 5);

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace polyfield
