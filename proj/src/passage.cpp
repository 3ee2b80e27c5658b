#include "mfruin/passage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "mfruin/errors.hpp"
#include "mfruin/parallel.hpp"
#include "mfruin/pathgen.hpp"
#include "mfruin/ruin.hpp"
#include "mfruin/stats.hpp"

namespace mfruin {

void PassageQuery::validate() const {
  grid.validate();
  if (!(barrier > 0.0)) throw std::domain_error("PassageQuery: barrier v must be > 0");
  if (!(tilt > 0.0)) throw std::domain_error("PassageQuery: tilt a must be > 0");
  if (moment_order < 1)
    throw std::domain_error("PassageQuery: moment order must be >= 1");
  if (!(sigma > 0.0)) throw std::domain_error("PassageQuery: sigma must be > 0");
  if (!(hurst > 0.5) || !(hurst < 1.0))
    throw std::domain_error("PassageQuery: hurst must lie in (1/2, 1)");
  if (n_paths < 1) throw std::domain_error("PassageQuery: n_paths must be >= 1");
}

namespace {

struct LnShape {
  double u, a, alpha, beta;
  // Integrand after t = e^s: exp(-f(s)^2/2 + s), f(s) = u e^{-alpha s} - a e^{beta s}.
  double operator()(double s) const {
    const double f = u * std::exp(-alpha * s) - a * std::exp(beta * s);
    const double expo = -0.5 * f * f + s;
    return expo < -745.0 ? 0.0 : std::exp(expo);
  }
};

double adaptive_simpson(const LnShape& f, double lo, double mid, double hi,
                        double f_lo, double f_mid, double f_hi, double whole,
                        double tol, int depth) {
  const double lm = 0.5 * (lo + mid);
  const double mh = 0.5 * (mid + hi);
  const double f_lm = f(lm);
  const double f_mh = f(mh);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_mh + f_hi);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, lo, lm, mid, f_lo, f_lm, f_mid, left, 0.5 * tol,
                          depth - 1) +
         adaptive_simpson(f, mid, mh, hi, f_mid, f_mh, f_hi, right, 0.5 * tol,
                          depth - 1);
}

}  // namespace

double ln_integral(double u, double hurst_param, double a, int n) {
  if (n < 1) throw std::domain_error("ln_integral: n must be >= 1");
  if (!(hurst_param > 0.0) || !(hurst_param < static_cast<double>(n)))
    throw std::domain_error("ln_integral: need 0 < H < n");
  if (!(u > 0.0)) throw std::domain_error("ln_integral: u must be > 0");
  if (!(a > 0.0))
    throw numerical_error(
        "ln_integral: divergent for a <= 0 (integrand tends to 1 at infinity)");

  const double denom = static_cast<double>(n) - hurst_param;
  LnShape f{u, a, hurst_param / denom, (1.0 - hurst_param) / denom};

  // The exp(-f^2/2) factor peaks where f vanishes; the s-Jacobian shifts the
  // mode only slightly, so bracket outward from that root until the
  // integrand is negligible relative to the largest value seen.
  const double s_peak = std::log(u / a) / (f.alpha + f.beta);
  double f_max = f(s_peak);
  double lo = s_peak, hi = s_peak;
  const double step = 0.5;
  for (int i = 0; i < 4000; ++i) {
    lo -= step;
    const double v = f(lo);
    f_max = std::max(f_max, v);
    if (v <= 1e-18 * f_max) break;
  }
  for (int i = 0; i < 4000; ++i) {
    hi += step;
    const double v = f(hi);
    f_max = std::max(f_max, v);
    if (v <= 1e-18 * f_max) break;
  }

  const double mid = 0.5 * (lo + hi);
  const double f_lo = f(lo), f_mid = f(mid), f_hi = f(hi);
  const double coarse = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  const double scale = std::max(coarse, f_max * (hi - lo) * 0.1);
  return adaptive_simpson(f, lo, mid, hi, f_lo, f_mid, f_hi, coarse,
                          1e-7 * scale, 48);
}

double moment_upper_bound(double v, double a, double hurst, int n) {
  if (!(v > 0.0) || !(a > 0.0))
    throw std::domain_error("moment_upper_bound: v and a must be > 0");
  if (n < 1) throw std::domain_error("moment_upper_bound: n must be >= 1");
  if (!(hurst > 0.5) || !(hurst < 1.0))
    throw std::domain_error("moment_upper_bound: hurst must lie in (1/2, 1)");
  const double hp = (2.0 * hurst + 1.0) / 4.0;  // H'
  const double sqrt2 = std::sqrt(2.0);
  const double ln_n = ln_integral(v / sqrt2, hp, a / sqrt2, n);
  const double ln_n1 = ln_integral(v / sqrt2, hp, a / sqrt2, n + 1);
  const double term1 = v * hp / (sqrt2 * (n - hp)) * ln_n;
  const double term2 = (1.0 - hp) * a / (sqrt2 * (n + 1.0 - hp)) * ln_n1;
  return (term1 + term2) / std::sqrt(2.0 * M_PI);
}

PassageMoments passage_moment_mc(const PassageQuery& query) {
  query.validate();
  const GridSpec& grid = query.grid;
  ModelParams params;
  params.hurst = query.hurst;
  params.sigma = query.sigma;

  const FgnSampler sampler(grid.steps, query.hurst, grid.step());
  std::vector<double> values(query.n_paths, 0.0);
  std::vector<char> crossed(query.n_paths, 0);

  parallel_for(query.n_paths, query.threads, [&](long begin, long end) {
    for (long p = begin; p < end; ++p) {
      RngStream rng(query.seed, query.stream_offset + p);
      MixedPath path = sample_mixed_path(grid, params, rng, sampler);
      if (auto k = first_passage_index(path.d_xi, grid, query.tilt,
                                       query.barrier)) {
        crossed[p] = 1;
        values[p] = std::pow(grid.time(*k), query.moment_order);
      }
    }
  });

  std::vector<double> hits;
  hits.reserve(query.n_paths);
  for (long p = 0; p < query.n_paths; ++p)
    if (crossed[p]) hits.push_back(values[p]);

  PassageMoments out;
  out.n_paths = query.n_paths;
  out.non_crossing_fraction =
      1.0 - static_cast<double>(hits.size()) / static_cast<double>(query.n_paths);
  if (!hits.empty()) {
    SampleStats s = sample_stats(hits);
    out.moment = s.mean;
    out.std_err = s.std_err;
  }
  if (out.non_crossing_fraction > 0.01)
    std::fprintf(stderr,
                 "passage_moment_mc: warning: %.2f%% of paths did not cross "
                 "v=%g by T=%g; moment is biased low\n",
                 100.0 * out.non_crossing_fraction, query.barrier,
                 grid.horizon);
  return out;
}

}  // namespace mfruin
