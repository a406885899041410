// Deterministic random number generation.
//
// mt19937_64 output is fully specified by the standard, and the uniform and
// normal transforms below avoid the implementation-defined std::*_distribution
// adapters, so a fixed seed reproduces the identical stream on every build.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace modal {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // 1 - uniform() lies in (2^-53, 1], keeping the log argument positive.
    const double u = 1.0 - uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 2.0 * M_PI * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Complex normal with unit total variance (1/2 per component).
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  std::uint64_t raw() { return eng_(); }

  // Substream seed derived via splitmix64 so per-trial streams do not overlap
  // trivially with the parent stream.
  std::uint64_t derive(std::uint64_t salt) {
    std::uint64_t z = seed_mix_ + (salt + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  void note_seed(std::uint64_t s) { seed_mix_ = s; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
  std::uint64_t seed_mix_ = 0;
};

// Random unit vector, complex Gaussian components (Haar on the sphere).
inline Eigen::VectorXcd random_unit_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.complex_normal();
  v /= v.norm();
  return v;
}

// Haar-distributed unitary via QR of a complex Ginibre matrix with the
// R-diagonal phase fix.
inline Eigen::MatrixXcd haar_unitary(Rng& rng, Eigen::Index n) {
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    std::complex<double> d = r(j, j);
    double ad = std::abs(d);
    q.col(j) *= (ad > 0) ? d / ad : 1.0;
  }
  return q;
}

// GUE-type Hermitian matrix: independent complex Gaussian entries above the
// diagonal with standard deviation `entry_scale`, real diagonal of matching
// variance.
inline Eigen::MatrixXcd gaussian_hermitian(Rng& rng, Eigen::Index n,
                                           double entry_scale) {
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    h(j, j) = entry_scale * rng.normal();
    for (Eigen::Index i = j + 1; i < n; ++i) {
      std::complex<double> z = entry_scale * rng.complex_normal();
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

}  // namespace modal
