#include "photon.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace modal {

namespace {

constexpr double kUnitTol = 1e-10;
// A grid point with raw block amplitudes squared summing below this has no
// receptor coverage at all.
constexpr double kCoverageFloor = 1e-30;
constexpr double kNegativeProbTol = 1e-10;
constexpr double kBranchFloor = 1e-14;

std::string fmt(const char* tpl, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, tpl, a, b, c);
  return buf;
}

}  // namespace

ObjectGrid::ObjectGrid(Eigen::Index size, double x_min, double x_max)
    : size_(size), x_min_(x_min), x_max_(x_max) {
  if (size < 2) throw DimensionError("object grid needs at least 2 points");
  if (!(x_max > x_min)) throw DimensionError("object grid needs x_max > x_min");
  dx_ = (x_max - x_min) / static_cast<double>(size);
  pos_.resize(size);
  for (Eigen::Index m = 0; m < size; ++m)
    pos_[m] = x_min + (static_cast<double>(m) + 0.5) * dx_;
}

bool ObjectGrid::same_grid(const ObjectGrid& other) const {
  const double span = x_max_ - x_min_;
  return size_ == other.size_ && std::abs(x_min_ - other.x_min_) <= 1e-12 * span &&
         std::abs(x_max_ - other.x_max_) <= 1e-12 * span;
}

double TransferFunctions::profile(double a, double sigma) {
  a = std::abs(a);
  if (a >= 2.0 * sigma) return 0.0;
  double taper = 1.0;
  if (a > sigma) {
    const double s = std::cos(0.5 * M_PI * (a - sigma) / sigma);
    taper = s * s;
  }
  return std::exp(-a * a / (4.0 * sigma * sigma)) * taper;
}

TransferFunctions::TransferFunctions(const ObjectGrid& grid, Eigen::Index n_blocks,
                                     double sigma, AffineImageMap map)
    : grid_(grid), sigma_(sigma), map_(map) {
  const double a = map(grid.x_min());
  const double b = map(grid.x_max());
  centers_.resize(n_blocks);
  c_.resize(n_blocks, grid.size());
  build(std::min(a, b), std::max(a, b));
}

TransferFunctions::TransferFunctions(const ObjectGrid& grid, Eigen::Index n_blocks,
                                     double sigma, AffineImageMap map, double block_lo,
                                     double block_hi)
    : grid_(grid), sigma_(sigma), map_(map) {
  centers_.resize(n_blocks);
  c_.resize(n_blocks, grid.size());
  build(block_lo, block_hi);
}

void TransferFunctions::build(double block_lo, double block_hi) {
  const Eigen::Index n = centers_.size();
  if (n < 2) throw DimensionError("need at least 2 receptor blocks");
  if (!(sigma_ > 0) || !std::isfinite(sigma_))
    throw DimensionError("point-spread width must be positive and finite");
  if (!(block_hi > block_lo)) throw DimensionError("empty block span");
  if (map_.scale == 0.0) throw DimensionError("image map must be invertible (scale != 0)");

  pitch_ = (block_hi - block_lo) / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j)
    centers_[j] = block_lo + (static_cast<double>(j) + 0.5) * pitch_;

  for (Eigen::Index m = 0; m < grid_.size(); ++m) {
    const double u = map_(grid_.position(m));
    double z = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double g = profile(u - centers_[j], sigma_);
      c_(j, m) = g;
      z += g * g;
    }
    if (z < kCoverageFloor)
      throw DimensionError(
          fmt("photon misses the block array: no receptor coverage at x = %g (image %g)",
              grid_.position(m), u));
    const double inv = 1.0 / std::sqrt(z);
    for (Eigen::Index j = 0; j < n; ++j) c_(j, m) *= inv;
  }
}

ObjectDensity::ObjectDensity(const ObjectGrid& grid, Matrix rho)
    : grid_(grid), rho_(std::move(rho)) {
  if (rho_.rows() != grid.size() || rho_.cols() != grid.size())
    throw DimensionError("object density does not match its grid");
  const double scale = std::max(1.0, rho_.cwiseAbs().maxCoeff());
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kUnitTol * scale)
    throw InvariantViolation("object density is not Hermitian");
  double tr = 0;
  for (Eigen::Index m = 0; m < rho_.rows(); ++m) {
    const double d = rho_(m, m).real();
    if (d < -kUnitTol * scale)
      throw InvariantViolation("object density has a negative diagonal entry");
    tr += d;
  }
  tr *= grid_.dx();
  if (std::abs(tr - 1.0) > 1e-9)
    throw InvariantViolation(fmt("object density trace is %g, expected 1", tr));
}

ObjectDensity ObjectDensity::from_wavefunction(const ObjectGrid& grid, const Vector& psi) {
  if (psi.size() != grid.size())
    throw DimensionError("wave function does not match its grid");
  const double n2 = psi.squaredNorm() * grid.dx();
  if (std::abs(n2 - 1.0) > kUnitTol)
    throw InvariantViolation(fmt("wave function norm^2 is %g, expected 1", n2));
  return ObjectDensity(grid, (psi * psi.adjoint()).eval());
}

double ObjectDensity::trace() const { return rho_.diagonal().real().sum() * grid_.dx(); }

void ObjectDensity::validate_psd() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = std::max(1.0, es.eigenvalues().maxCoeff());
  if (lo < -kUnitTol * hi)
    throw InvariantViolation(fmt("object density has negative eigenvalue %g", lo));
}

double position_mean(const ObjectDensity& rho) {
  const auto& g = rho.grid();
  double s = 0;
  for (Eigen::Index m = 0; m < g.size(); ++m)
    s += g.position(m) * rho.mat()(m, m).real();
  return s * g.dx();
}

double position_std(const ObjectDensity& rho) {
  const auto& g = rho.grid();
  const double mu = position_mean(rho);
  double s = 0;
  for (Eigen::Index m = 0; m < g.size(); ++m) {
    const double d = g.position(m) - mu;
    s += d * d * rho.mat()(m, m).real();
  }
  return std::sqrt(std::max(0.0, s * g.dx()));
}

RecoilKernel::RecoilKernel(const ObjectGrid& grid, Matrix kernel, double width, double kick)
    : grid_(grid), k_(std::move(kernel)), width_(width), kick_(kick) {
  if (k_.rows() != grid.size() || k_.cols() != grid.size())
    throw DimensionError("recoil kernel does not match its grid");
  if ((k_ - k_.adjoint()).cwiseAbs().maxCoeff() > kUnitTol)
    throw InvariantViolation("recoil kernel is not Hermitian");
  for (Eigen::Index m = 0; m < k_.rows(); ++m)
    if (std::abs(k_(m, m) - Complex(1, 0)) > kUnitTol)
      throw InvariantViolation("recoil kernel diagonal must be 1 (states are normalized)");
}

RecoilKernel RecoilKernel::gaussian(const ObjectGrid& grid, double w, double q) {
  if (w < 0 || std::isnan(w)) throw DimensionError("recoil packet width must be >= 0");
  const Eigen::Index n = grid.size();
  Matrix k(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const double d = grid.position(a) - grid.position(b);
      double v;
      if (w == 0.0)
        v = (a == b) ? 1.0 : 0.0;
      else
        v = std::exp(-d * d / (8.0 * w * w));
      k(a, b) = v;
    }
  return RecoilKernel(grid, std::move(k), w, q);
}

RecoilKernel RecoilKernel::orthogonal(const ObjectGrid& grid) {
  return RecoilKernel(grid, Matrix::Identity(grid.size(), grid.size()), 0.0, 0.0);
}

RecoilKernel RecoilKernel::flat(const ObjectGrid& grid) {
  return RecoilKernel(grid, Matrix::Ones(grid.size(), grid.size()),
                      std::numeric_limits<double>::infinity(), 0.0);
}

void RecoilKernel::validate_psd() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(k_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kUnitTol * static_cast<double>(k_.rows()))
    throw InvariantViolation("recoil kernel is not positive semidefinite");
}

RealVector display_probabilities(const ObjectDensity& rho, const TransferFunctions& tf) {
  if (!rho.grid().same_grid(tf.grid()))
    throw DimensionError("object density and transfer functions use different grids");
  const Eigen::Index n = tf.blocks();
  RealVector p(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0;
    for (Eigen::Index m = 0; m < rho.grid().size(); ++m)
      s += rho.mat()(m, m).real() * tf.values()(j, m) * tf.values()(j, m);
    p[j] = std::max(0.0, s * rho.grid().dx());
  }
  if (std::abs(p.sum() - 1.0) > 1e-9)
    throw InvariantViolation(fmt("display probabilities sum to %g", p.sum()));
  return p;
}

RealVector display_probabilities_recoil(const ObjectDensity& rho, const TransferFunctions& tf,
                                        const RecoilKernel& kernel, double* branch_norm) {
  if (!rho.grid().same_grid(tf.grid()) || !rho.grid().same_grid(kernel.grid()))
    throw DimensionError("density, transfer functions and recoil kernel grids differ");
  const Eigen::Index n = tf.blocks();
  const Matrix damped = rho.mat().cwiseProduct(kernel.mat());
  const Matrix c = tf.values().cast<Complex>();
  RealVector p(n);
  double total = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex acc = (c.row(j) * damped * c.row(j).adjoint())(0, 0);
    double w = acc.real() * rho.grid().dx();
    if (std::abs(acc.imag()) * rho.grid().dx() > 1e-9)
      throw InvariantViolation("recoil branch weight has a nonzero imaginary part");
    if (w < -kNegativeProbTol)
      throw InvariantViolation(
          fmt("recoil branch weight %g < 0: kernel is not positive semidefinite", w));
    p[j] = std::max(0.0, w);
    total += p[j];
  }
  if (branch_norm) *branch_norm = total;
  if (total < kBranchFloor)
    throw InvariantViolation("all recoil branch weights vanish");
  return p / total;
}

Matrix photon_kernel(const TransferFunctions& tf) {
  RealMatrix g = tf.values().transpose() * tf.values();
  // The diagonal is 1 by column normalization; pin it exactly so that
  // applying the kernel never perturbs populations.
  g.diagonal().setOnes();
  return g.cast<Complex>();
}

ObjectDensity object_state_after_light(const ObjectDensity& rho, const TransferFunctions& tf) {
  if (!rho.grid().same_grid(tf.grid()))
    throw DimensionError("object density and transfer functions use different grids");
  return ObjectDensity(rho.grid(), rho.mat().cwiseProduct(photon_kernel(tf)));
}

ObjectDensity relational_object_state(const ObjectDensity& rho, const TransferFunctions& tf,
                                      Eigen::Index j) {
  if (j < 0 || j >= tf.blocks()) throw DimensionError("block index out of range");
  const RealVector p = display_probabilities(rho, tf);
  if (p[j] <= kBranchFloor)
    throw ZeroProbabilityBranch(fmt("display outcome %g has probability %g",
                                    static_cast<double>(j), p[j]));
  const Eigen::Index msize = rho.grid().size();
  Matrix out(msize, msize);
  for (Eigen::Index a = 0; a < msize; ++a)
    for (Eigen::Index b = 0; b < msize; ++b)
      out(a, b) = tf.values()(j, a) * rho.mat()(a, b) * tf.values()(j, b) / p[j];
  return ObjectDensity(rho.grid(), std::move(out));
}

DensityOperator generic_display_density(const std::vector<MeasurementBranch>& branches) {
  if (branches.empty()) throw DimensionError("no measurement branches");
  const size_t n = branches[0].bits.size();
  if (n < 1 || n > 16) throw DimensionError("display count out of range [1, 16]");
  const Eigen::Index oe_dim = branches[0].object_env.size();

  double total = 0;
  std::vector<Eigen::Index> seen;
  for (const auto& br : branches) {
    if (br.bits.size() != n) throw DimensionError("branches disagree on display count");
    if (br.object_env.size() != oe_dim || oe_dim < 1)
      throw DimensionError("branches disagree on object-environment dimension");
    if (std::abs(br.object_env.norm() - 1.0) > kUnitTol)
      throw InvariantViolation("branch object-environment state is not normalized");
    Eigen::Index idx = 0;
    for (size_t i = 0; i < n; ++i) {
      if (br.bits[i] != 0 && br.bits[i] != 1)
        throw DimensionError("display bits must be 0 or 1");
      idx = idx * 2 + br.bits[i];
    }
    for (Eigen::Index s : seen)
      if (s == idx) throw DimensionError("duplicate display configuration across branches");
    seen.push_back(idx);
    total += std::norm(br.amplitude);
  }
  if (std::abs(total - 1.0) > kUnitTol)
    throw InvariantViolation(fmt("branch weights sum to %g, expected 1", total));

  std::vector<Subsystem> parts;
  parts.reserve(n);
  for (size_t i = 0; i < n; ++i) parts.push_back({"D" + std::to_string(i + 1), 2});
  CompositeSpace space(std::move(parts));
  Matrix rho = Matrix::Zero(space.total_dim(), space.total_dim());
  // The receptors carry the which-branch record and are traced out, so only
  // the diagonal survives regardless of the object-environment overlaps.
  for (size_t b = 0; b < branches.size(); ++b)
    rho(seen[b], seen[b]) = std::norm(branches[b].amplitude);
  return DensityOperator(space, std::move(rho));
}

}  // namespace modal
