#pragma once

#include <functional>
#include <vector>

namespace lcoal {

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  long n = 0;
  double lower(double z = 1.959963984540054) const { return mean - z * standard_error; }
  double upper(double z = 1.959963984540054) const { return mean + z * standard_error; }
};

MeanEstimate mean_estimate(const std::vector<double>& xs);

// Kolmogorov-Smirnov distance between the sample's empirical CDF and cdf.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
// Asymptotic Kolmogorov survival function Q(lambda) = P(sup|B| > lambda).
double kolmogorov_survival(double lambda);
// One-sample p-value with the Stephens small-sample correction.
double ks_pvalue(double d, long n);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int cells = 0;  // after pooling
};

// Goodness of fit of counts against probabilities. Cells with expected count
// below min_expected are pooled (in order) with their neighbours.
ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& probs,
                                double min_expected = 5.0);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);
// Normalized histogram of nonnegative integer outcomes.
std::vector<double> empirical_distribution(const std::vector<int>& outcomes, std::size_t support = 0);

}  // namespace lcoal
