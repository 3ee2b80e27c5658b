#include "mfruin/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace mfruin {

double pairwise_sum(const double* data, long count) {
  if (count <= 0) return 0.0;
  if (count <= 32) {
    double acc = 0.0;
    for (long i = 0; i < count; ++i) acc += data[i];
    return acc;
  }
  const long half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

double pairwise_sum(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return pairwise_sum(v.data(), v.size());
}

double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), static_cast<long>(v.size()));
}

SampleStats sample_stats(const std::vector<double>& v) {
  SampleStats s;
  s.count = static_cast<long>(v.size());
  if (s.count == 0) return s;
  s.mean = pairwise_sum(v) / s.count;

  std::vector<double> m2(v.size()), m3(v.size()), m4(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - s.mean;
    m2[i] = d * d;
    m3[i] = d * d * d;
    m4[i] = d * d * d * d;
  }
  const double n = static_cast<double>(s.count);
  const double mu2 = pairwise_sum(m2) / n;
  s.variance = s.count > 1 ? pairwise_sum(m2) / (n - 1.0) : 0.0;
  s.std_err = s.count > 1 ? std::sqrt(s.variance / n) : 0.0;
  if (mu2 > 0.0) {
    s.skewness = (pairwise_sum(m3) / n) / std::pow(mu2, 1.5);
    s.kurtosis = (pairwise_sum(m4) / n) / (mu2 * mu2);
  }
  return s;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ols_slope: need matching series, length >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n;
  const double my = pairwise_sum(y) / n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_slope: degenerate x");
  return sxy / sxx;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("normal_quantile: p must lie in (0,1)");
  // Acklam coefficients.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley refinement against the exact CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double jarque_bera(const SampleStats& s) {
  const double n = static_cast<double>(s.count);
  const double excess = s.kurtosis - 3.0;
  return n / 6.0 * (s.skewness * s.skewness + excess * excess / 4.0);
}

bool jarque_bera_rejects_1pct(const SampleStats& s) {
  return jarque_bera(s) > 9.210340371976184;  // chi^2_2 quantile at 0.99
}

}  // namespace mfruin
