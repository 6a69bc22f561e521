#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace vrjp {

struct TestReport {
  std::string name;
  std::size_t n = 0;
  std::string statistic_name;
  double statistic = 0.0;
  std::string score_name = "p";  // "p" or "z" or "max_error"
  double score = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool exploratory = false;
  bool statistical = true;       // eligible for the single rerun
  std::string identity;          // short description of the checked identity
  std::vector<std::string> notes;
};

// Kolmogorov limiting survival function P(K > x).
double kolmogorov_survival(double x);

TestReport ks_test(std::vector<double> sample, const std::function<double(double)>& cdf, double alpha = 0.01);
TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01);

// Chi-square homogeneity on a 2 x K table of counts. Categories whose
// expected count under pooling falls below `min_expected` in either row are
// merged into one residual category.
TestReport chi2_homogeneity(const std::vector<double>& a, const std::vector<double>& b, double alpha = 0.01,
                            double min_expected = 5.0);

// Distance covariance independence test using the conservative asymptotic
// rule of Szekely, Rizzo and Bakirov: reject when n V^2 / S2 exceeds the
// squared normal quantile at 1 - alpha/2. Rows are observations.
TestReport distance_correlation_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha = 0.01);
double distance_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

double gamma_half_cdf(double x);                     // Gamma(1/2, 1)
double inverse_gaussian_cdf(double x, double mean, double shape);
double chi2_survival(double x, double dof);
double normal_quantile(double p);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};
MeanEstimate mean_and_stderr(const std::vector<double>& v);
double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

}  // namespace vrjp
