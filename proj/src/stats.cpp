#include "vrjp/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/inverse_gaussian.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vrjp {

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double stephens(double ne, double d) {
  const double s = std::sqrt(ne);
  return kolmogorov_survival((s + 0.12 + 0.11 / s) * d);
}

TestReport p_report(std::string name, std::size_t n, std::string stat_name, double stat, double p, double alpha) {
  TestReport r;
  r.name = std::move(name);
  r.n = n;
  r.statistic_name = std::move(stat_name);
  r.statistic = stat;
  r.score_name = "p";
  r.score = p;
  r.threshold = alpha;
  r.pass = p > alpha;
  return r;
}

}  // namespace

TestReport ks_test(std::vector<double> sample, const std::function<double(double)>& cdf, double alpha) {
  if (sample.empty()) throw std::invalid_argument("KS test on empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return p_report("ks", sample.size(), "D", d, stephens(n, d), alpha);
}

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test on empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return p_report("ks2", a.size() + b.size(), "D", d, stephens(na * nb / (na + nb), d), alpha);
}

double chi2_survival(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

TestReport chi2_homogeneity(const std::vector<double>& a, const std::vector<double>& b, double alpha,
                            double min_expected) {
  if (a.size() != b.size()) throw std::invalid_argument("category count mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0), nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(na > 0.0 && nb > 0.0)) throw std::invalid_argument("empty sample in homogeneity test");
  const double fa = na / (na + nb), fb = nb / (na + nb);
  std::vector<double> ca, cb;
  double ra = 0.0, rb = 0.0;
  std::size_t merged = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double tot = a[k] + b[k];
    if (tot == 0.0) continue;
    if (tot * std::min(fa, fb) < min_expected) {
      ra += a[k];
      rb += b[k];
      ++merged;
    } else {
      ca.push_back(a[k]);
      cb.push_back(b[k]);
    }
  }
  if (ra + rb > 0.0) {
    ca.push_back(ra);
    cb.push_back(rb);
  }
  double stat = 0.0;
  for (std::size_t k = 0; k < ca.size(); ++k) {
    const double tot = ca[k] + cb[k];
    const double ea = tot * fa, eb = tot * fb;
    stat += (ca[k] - ea) * (ca[k] - ea) / ea + (cb[k] - eb) * (cb[k] - eb) / eb;
  }
  const double dof = static_cast<double>(ca.size()) - 1.0;
  auto r = p_report("chi2-homogeneity", static_cast<std::size_t>(na + nb), "chi2", stat,
                    dof > 0 ? chi2_survival(stat, dof) : 1.0, alpha);
  r.notes.push_back("categories=" + std::to_string(ca.size()) + " merged=" + std::to_string(merged));
  return r;
}

namespace {

struct DcovParts {
  double v2 = 0.0, s2 = 0.0, vxx = 0.0, vyy = 0.0;
};

DcovParts dcov_parts(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows()) throw std::invalid_argument("sample size mismatch");
  const Eigen::Index n = x.rows();
  Eigen::VectorXd ra = Eigen::VectorXd::Zero(n), rb = Eigen::VectorXd::Zero(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = (x.row(i) - x.row(j)).norm();
      const double b = (y.row(i) - y.row(j)).norm();
      ra(i) += a;
      ra(j) += a;
      rb(i) += b;
      rb(j) += b;
      sab += 2.0 * a * b;
      saa += 2.0 * a * a;
      sbb += 2.0 * b * b;
    }
  }
  const double nn = static_cast<double>(n);
  const double ga = ra.sum() / (nn * nn), gb = rb.sum() / (nn * nn);
  const Eigen::VectorXd ma = ra / nn, mb = rb / nn;
  DcovParts p;
  p.v2 = sab / (nn * nn) + ga * gb - 2.0 * ma.dot(mb) / nn;
  p.vxx = saa / (nn * nn) + ga * ga - 2.0 * ma.squaredNorm() / nn;
  p.vyy = sbb / (nn * nn) + gb * gb - 2.0 * mb.squaredNorm() / nn;
  p.s2 = ga * gb;
  return p;
}

}  // namespace

double distance_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const auto p = dcov_parts(x, y);
  const double den = std::sqrt(std::max(p.vxx, 0.0) * std::max(p.vyy, 0.0));
  return den > 0.0 ? std::sqrt(std::max(p.v2, 0.0) / den) : 0.0;
}

TestReport distance_correlation_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha) {
  const auto p = dcov_parts(x, y);
  const double nn = static_cast<double>(x.rows());
  const double t = p.s2 > 0.0 ? nn * p.v2 / p.s2 : 0.0;
  const double pval = std::erfc(std::sqrt(std::max(t, 0.0)) / std::sqrt(2.0));
  auto r = p_report("dcov-independence", x.rows(), "nV2/S2", t, pval, alpha);
  const double den = std::sqrt(std::max(p.vxx, 0.0) * std::max(p.vyy, 0.0));
  r.notes.push_back("dcor=" + std::to_string(den > 0.0 ? std::sqrt(std::max(p.v2, 0.0) / den) : 0.0));
  return r;
}

double gamma_half_cdf(double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(x)); }

double inverse_gaussian_cdf(double x, double mean, double shape) {
  if (x <= 0.0) return 0.0;
  return boost::math::cdf(boost::math::inverse_gaussian_distribution<double>(mean, shape), x);
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

MeanEstimate mean_and_stderr(const std::vector<double>& v) {
  MeanEstimate m;
  if (v.empty()) return m;
  const double n = static_cast<double>(v.size());
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return m;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace vrjp
