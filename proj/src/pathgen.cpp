#include "mfruin/pathgen.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "mfruin/errors.hpp"

namespace mfruin {

double fgn_autocovariance(long k, double hurst, double h) {
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::domain_error("fgn_autocovariance: hurst must lie in (0,1)");
  if (!(h > 0.0)) throw std::domain_error("fgn_autocovariance: h must be > 0");
  const double a = std::abs(static_cast<double>(k));
  const double e = 2.0 * hurst;
  return std::pow(h, e) * 0.5 *
         (std::pow(a + 1.0, e) + (a > 0.0 ? std::pow(a - 1.0, e) : 1.0) -
          2.0 * std::pow(a, e));
}

FgnSampler::FgnSampler(int n, double hurst, double h, FgnMethod method)
    : n_(n), hurst_(hurst), h_(h), method_(method) {
  if (n < 1) throw std::domain_error("FgnSampler: n must be >= 1");
  if (!(hurst > 0.0) || !(hurst < 1.0))
    throw std::domain_error("FgnSampler: hurst must lie in (0,1)");
  if (!(h > 0.0)) throw std::domain_error("FgnSampler: h must be > 0");

  if (method_ == FgnMethod::circulant) {
    // First row of the 2n circulant: c_0..c_n, c_{n-1}..c_1.
    const int m = 2 * n_;
    Eigen::VectorXcd row(m);
    for (int j = 0; j <= n_; ++j) row(j) = fgn_autocovariance(j, hurst_, h_);
    for (int j = n_ + 1; j < m; ++j) row(j) = row(m - j);

    Eigen::FFT<double> fft;
    Eigen::VectorXcd freq(m);
    fft.fwd(freq, row);

    // fGn embeds nonnegative-definitely for every H in (0,1); a materially
    // negative eigenvalue therefore flags a bug, not a user error.
    const double scale = std::abs(freq(0).real());
    spectral_scale_.resize(m);
    for (int k = 0; k < m; ++k) {
      double lam = freq(k).real();
      if (lam < -1e-9 * std::max(1.0, scale))
        throw numerical_error("FgnSampler: negative circulant eigenvalue " +
                              std::to_string(lam));
      lam = std::max(lam, 0.0);
      // Diagonal draws (k = 0, n) get weight sqrt(lam/m); conjugate pairs
      // share lam over two independent normals, hence sqrt(lam/(2m)).
      const bool paired = (k != 0 && k != n_);
      spectral_scale_(k) = std::sqrt(lam / (paired ? 2.0 * m : 1.0 * m));
    }
  } else {
    Eigen::MatrixXd cov(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        cov(i, j) = fgn_autocovariance(i - j, hurst_, h_);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw numerical_error("FgnSampler: fGn covariance not positive definite");
    chol_factor_ = llt.matrixL();
  }
}

Eigen::VectorXd FgnSampler::sample(RngStream& rng) const {
  if (method_ == FgnMethod::dense_factor) {
    Eigen::VectorXd z(n_);
    for (int i = 0; i < n_; ++i) z(i) = rng.next_normal();
    return chol_factor_ * z;
  }

  const int m = 2 * n_;
  Eigen::VectorXcd y(m);
  // Fixed draw order (k=0, k=n, then pairs k=1..n-1) pins the normal stream
  // layout so a given (seed, index) reproduces the same path forever.
  y(0) = std::complex<double>(spectral_scale_(0) * rng.next_normal(), 0.0);
  y(n_) = std::complex<double>(spectral_scale_(n_) * rng.next_normal(), 0.0);
  for (int k = 1; k < n_; ++k) {
    const double re = rng.next_normal();
    const double im = rng.next_normal();
    y(k) = spectral_scale_(k) * std::complex<double>(re, im);
    y(m - k) = std::conj(y(k));
  }

  Eigen::FFT<double> fft;
  Eigen::VectorXcd out(m);
  fft.fwd(out, y);
  return out.head(n_).real();
}

Eigen::VectorXd MixedPath::xi_levels() const {
  Eigen::VectorXd levels(d_xi.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < d_xi.size(); ++k) {
    acc += d_xi(k);
    levels(k) = acc;
  }
  return levels;
}

MixedPath sample_mixed_path(const GridSpec& grid, const ModelParams& params,
                            const RngStream& rng, const FgnSampler& fgn) {
  grid.validate();
  params.validate();
  if (fgn.size() != grid.steps)
    throw std::invalid_argument("sample_mixed_path: sampler/grid size mismatch");

  RngStream fgn_stream = rng.fork(0);
  RngStream bm_stream = rng.fork(1);

  MixedPath path;
  path.grid = grid;
  path.d_bh = fgn.sample(fgn_stream);
  const double sqrt_h = std::sqrt(grid.step());
  path.d_w.resize(grid.steps);
  for (int k = 0; k < grid.steps; ++k)
    path.d_w(k) = sqrt_h * bm_stream.next_normal();
  path.d_xi = params.sigma * path.d_w + path.d_bh;
  return path;
}

MixedPath sample_mixed_path(const GridSpec& grid, const ModelParams& params,
                            const RngStream& rng, FgnMethod method) {
  FgnSampler fgn(grid.steps, params.hurst, grid.step(), method);
  return sample_mixed_path(grid, params, rng, fgn);
}

Eigen::VectorXd surplus_path(const MixedPath& path, const ModelParams& params) {
  const int n = path.grid.steps;
  Eigen::VectorXd x(n + 1);
  x(0) = params.initial;
  double xi = 0.0;
  for (int k = 1; k <= n; ++k) {
    xi += path.d_xi(k - 1);
    x(k) = params.initial + params.drift * path.grid.time(k) - xi;
  }
  return x;
}

}  // namespace mfruin
