#pragma once

// Single-photon position measurement: an object on a 1-D grid scatters one
// photon which is absorbed by one of N receptor blocks, each block wired to
// its own display. Everything here is expressed on the grid, with integrals
// as dx-weighted sums.

#include <vector>

#include "hilbert.hpp"

namespace modal {

// Uniform 1-D grid of cell centers: x_m = x_min + (m + 1/2) dx. The cell
// centered layout keeps the narrow-psf limit aligned with block centers when
// M equals the number of blocks.
class ObjectGrid {
 public:
  ObjectGrid(Eigen::Index size, double x_min, double x_max);

  Eigen::Index size() const { return size_; }
  double dx() const { return dx_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double position(Eigen::Index m) const { return pos_[m]; }
  const RealVector& positions() const { return pos_; }
  bool same_grid(const ObjectGrid& other) const;

 private:
  Eigen::Index size_;
  double x_min_, x_max_, dx_;
  RealVector pos_;
};

// image(x) = scale * x + offset, the geometric-optics map from object
// coordinate to detector coordinate.
struct AffineImageMap {
  double scale = 1.0;
  double offset = 0.0;
  double operator()(double x) const { return scale * x + offset; }
};

// Amplitudes c_j(x_m) for the photon scattered at x_m to be absorbed in
// block j. The point-spread profile is a Gaussian of width sigma multiplied
// by a smooth cosine-squared cutoff, so a block is completely blind beyond
// 2*sigma from its center; the cutoff is C^1 so the implied photon momentum
// spread stays finite. Columns are normalized so the photon is absorbed
// with certainty: sum_j c_j(x_m)^2 = 1 for every m.
class TransferFunctions {
 public:
  // Blocks tile [block_lo, block_hi] in image coordinates; by default they
  // tile the image of the grid span.
  TransferFunctions(const ObjectGrid& grid, Eigen::Index n_blocks, double sigma,
                    AffineImageMap map = {});
  TransferFunctions(const ObjectGrid& grid, Eigen::Index n_blocks, double sigma,
                    AffineImageMap map, double block_lo, double block_hi);

  const RealMatrix& values() const { return c_; }  // N x M
  Eigen::Index blocks() const { return c_.rows(); }
  const ObjectGrid& grid() const { return grid_; }
  double sigma() const { return sigma_; }
  double pitch() const { return pitch_; }
  const RealVector& block_centers() const { return centers_; }
  const AffineImageMap& image_map() const { return map_; }

  // Raw (unnormalized) point-spread amplitude at distance a from a block
  // center. Exposed so quadrature checks can evaluate the same profile.
  static double profile(double a, double sigma);

 private:
  void build(double block_lo, double block_hi);

  ObjectGrid grid_;
  double sigma_;
  double pitch_ = 0;
  AffineImageMap map_;
  RealVector centers_;
  RealMatrix c_;
};

// Object reduced density in the coordinate representation, with the dx
// weight folded into the trace convention: dx * sum_m rho(m,m) = 1.
class ObjectDensity {
 public:
  ObjectDensity(const ObjectGrid& grid, Matrix rho);
  // psi holds the wave function at the grid points, dx-normalized:
  // dx * sum |psi_m|^2 = 1.
  static ObjectDensity from_wavefunction(const ObjectGrid& grid, const Vector& psi);

  const Matrix& mat() const { return rho_; }
  const ObjectGrid& grid() const { return grid_; }
  double trace() const;  // includes the dx weight

  // Eigenvalue check; quadratic-cubic in M, so opt-in rather than run at
  // every construction.
  void validate_psd() const;

 private:
  ObjectGrid grid_;
  Matrix rho_;
};

double position_mean(const ObjectDensity& rho);
double position_std(const ObjectDensity& rho);

// Overlaps <xi_{x_m'} | xi_{x_m}> of the object states after the photon
// recoil; mat()(m, mp) = <xi_{x_mp}|xi_{x_m}>. The Gaussian family comes
// from width-w packets displaced by a common momentum kick q (the kick
// cancels in the overlap).
class RecoilKernel {
 public:
  RecoilKernel(const ObjectGrid& grid, Matrix kernel, double width, double kick);
  static RecoilKernel gaussian(const ObjectGrid& grid, double w, double q = 0.0);
  // Negligible recoil: the post-interaction states stay orthogonal.
  static RecoilKernel orthogonal(const ObjectGrid& grid);
  // Infinitely wide packets: every post-interaction state is the same.
  static RecoilKernel flat(const ObjectGrid& grid);

  const Matrix& mat() const { return k_; }
  const ObjectGrid& grid() const { return grid_; }
  double width() const { return width_; }
  double kick() const { return kick_; }
  void validate_psd() const;

 private:
  ObjectGrid grid_;
  Matrix k_;
  double width_, kick_;
};

// p_j = dx * sum_m rho(m,m) c_j(x_m)^2. Only the diagonal of rho enters.
RealVector display_probabilities(const ObjectDensity& rho, const TransferFunctions& tf);

// p_j proportional to sum_{m,m'} rho(m,m') c_j(x_m) c_j(x_m') K(m,m').
// The recoil map is not an isometry for a non-orthogonal kernel, so the raw
// branch weights are renormalized into a distribution; the raw total is
// written to *branch_norm if given (1 exactly for the orthogonal kernel).
// A raw weight below -1e-10 means the kernel was not positive semidefinite.
RealVector display_probabilities_recoil(const ObjectDensity& rho, const TransferFunctions& tf,
                                        const RecoilKernel& kernel,
                                        double* branch_norm = nullptr);

// G(m,m') = sum_j c_j(x_m) c_j(x_m'); the photon-side overlap that damps
// object coherences once the photon has flown off. Diagonal pinned to 1.
Matrix photon_kernel(const TransferFunctions& tf);

// rho_after(m,m') = rho(m,m') * G(m,m'): object state with the photon traced
// out but no display read. Diagonal of rho is untouched.
ObjectDensity object_state_after_light(const ObjectDensity& rho, const TransferFunctions& tf);

// Object state relative to display j showing the hit:
// c_j(x) rho(x,x') c_j(x') / p_j.
ObjectDensity relational_object_state(const ObjectDensity& rho, const TransferFunctions& tf,
                                      Eigen::Index j);

// One branch of a generic N-display measurement: which displays fired, the
// branch amplitude, and the object+environment state left behind.
struct MeasurementBranch {
  std::vector<int> bits;   // length N, each 0 or 1
  Complex amplitude;
  Vector object_env;       // unit norm; same dimension across branches
};

// Reduced density of the N displays (each a qubit) after a measurement with
// the given branches. The receptors carry away the which-branch information,
// so the result is diagonal in the display product basis with weights
// |amplitude|^2 even when the object branches overlap.
DensityOperator generic_display_density(const std::vector<MeasurementBranch>& branches);

}  // namespace modal
