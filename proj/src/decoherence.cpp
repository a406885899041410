#include "decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"
#include "rng.hpp"

namespace modal {

namespace {

constexpr Eigen::Index kDirectExpmDim = 400;
constexpr Eigen::Index kFeasibleTotal = 1 << 14;
constexpr double kEigenvalueFloor = 1e-12;

std::string fmt(const char* tpl, double a, double b = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, tpl, a, b);
  return buf;
}

// w = exp(factor * h) v for Hermitian h. Small blocks go through the full
// eigensolver; large ones through Lanczos with full reorthogonalization,
// which only ever touches h via matrix-vector products.
Vector expm_multiply(const Matrix& h, const Vector& v, Complex factor) {
  const Eigen::Index n = h.rows();
  const double nrm = v.norm();
  if (nrm == 0.0) return v;

  if (n <= kDirectExpmDim) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector coef = es.eigenvectors().adjoint() * v;
    for (Eigen::Index i = 0; i < n; ++i)
      coef[i] *= std::exp(factor * es.eigenvalues()[i]);
    return es.eigenvectors() * coef;
  }

  const Eigen::Index m_max = std::min<Eigen::Index>(n, 260);
  Matrix q(n, m_max + 1);
  RealVector alpha(m_max), beta(m_max);
  q.col(0) = v / nrm;
  double scale = 0;

  auto krylov_result = [&](Eigen::Index m, double* err) -> Vector {
    // exp(factor * T_m) e1 via the real symmetric tridiagonal eigenproblem.
    RealMatrix t = RealMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
    Vector u = Vector::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Complex g = std::exp(factor * es.eigenvalues()[i]);
      for (Eigen::Index r = 0; r < m; ++r)
        u[r] += es.eigenvectors()(r, i) * g * es.eigenvectors()(0, i);
    }
    *err = nrm * beta[m - 1] * std::abs(u[m - 1]);
    return u;
  };

  for (Eigen::Index m = 0; m < m_max; ++m) {
    Vector w = h * q.col(m);
    alpha[m] = std::real(q.col(m).dot(w));
    w -= alpha[m] * q.col(m);
    if (m > 0) w -= beta[m - 1] * q.col(m - 1);
    // Two reorthogonalization passes keep the basis orthonormal to machine
    // precision; the cost is dwarfed by the matrix-vector product.
    w -= q.leftCols(m + 1) * (q.leftCols(m + 1).adjoint() * w).eval();
    w -= q.leftCols(m + 1) * (q.leftCols(m + 1).adjoint() * w).eval();
    beta[m] = w.norm();
    scale = std::max({scale, std::abs(alpha[m]), beta[m]});

    const bool breakdown = beta[m] <= 1e-13 * std::max(scale, 1.0);
    if (breakdown || m + 1 >= 12 || m + 1 == m_max) {
      if (breakdown || (m + 1) % 4 == 0 || m + 1 == m_max) {
        double err = 0;
        Vector u = krylov_result(m + 1, &err);
        if (breakdown || err <= 1e-12 * nrm)
          return q.leftCols(m + 1) * (nrm * u);
      }
    }
    q.col(m + 1) = w / beta[m];
  }
  throw InvariantViolation("sector evolution did not converge in the Krylov space");
}

SectorModel sample_model(std::vector<Eigen::Index> dims, Eigen::Index env_dim,
                         double beta, std::uint64_t seed) {
  Rng master(seed);
  master.note_seed(seed);
  std::vector<Matrix> h;
  h.reserve(dims.size());
  const double entry = beta / std::sqrt(static_cast<double>(env_dim));
  for (std::size_t n = 0; n < dims.size(); ++n) {
    Rng sector_rng(master.derive(static_cast<std::uint64_t>(n)));
    h.push_back(gaussian_hermitian(sector_rng, dims[n] * env_dim, entry));
  }
  return SectorModel(std::move(dims), env_dim, std::move(h), beta);
}

}  // namespace

SectorModel::SectorModel(std::vector<Eigen::Index> sector_dims, Eigen::Index env_dim,
                         std::vector<Matrix> sector_hamiltonians, double beta)
    : dims_(std::move(sector_dims)), env_dim_(env_dim), beta_(beta),
      h_(std::move(sector_hamiltonians)) {
  if (dims_.empty() || env_dim < 1)
    throw DimensionError("sector model needs sectors and an environment");
  if (h_.size() != dims_.size())
    throw DimensionError("one Hamiltonian block per sector required");
  k_total_ = 0;
  offsets_.resize(dims_.size());
  for (std::size_t n = 0; n < dims_.size(); ++n) {
    if (dims_[n] < 1) throw DimensionError("sector dimension must be positive");
    offsets_[n] = k_total_;
    k_total_ += dims_[n];
    const Eigen::Index want = dims_[n] * env_dim;
    if (h_[n].rows() != want || h_[n].cols() != want)
      throw DimensionError("sector Hamiltonian has the wrong dimension");
    const double scale = std::max(1.0, h_[n].cwiseAbs().maxCoeff());
    if ((h_[n] - h_[n].adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw InvariantViolation("sector Hamiltonian is not Hermitian");
  }
}

SectorModel build_sector_model(Eigen::Index k1, Eigen::Index k2, Eigen::Index env_dim,
                               double beta, std::uint64_t seed) {
  return sample_model({k1, k2}, env_dim, beta, seed);
}

SectorModel multi_display_model(Eigen::Index n_displays, Eigen::Index per_display_dim,
                                Eigen::Index env_dim, double beta, std::uint64_t seed) {
  if (n_displays < 1 || per_display_dim < 1)
    throw DimensionError("need at least one display with a positive dimension");
  Eigen::Index sector_dim = 1, sectors = 1;
  for (Eigen::Index i = 0; i < n_displays; ++i) {
    sector_dim *= per_display_dim;
    sectors *= 2;
  }
  if (sectors * sector_dim * env_dim > kFeasibleTotal)
    throw DimensionError(
        fmt("display x environment dimension %g exceeds the feasible cap %g",
            static_cast<double>(sectors * sector_dim * env_dim),
            static_cast<double>(kFeasibleTotal)));
  return sample_model(std::vector<Eigen::Index>(sectors, sector_dim), env_dim, beta,
                      seed);
}

Vector evolve_sector(const SectorModel& model, const Vector& phi, const Vector& xi,
                     double t, double hbar) {
  if (phi.size() != model.display_dim() || xi.size() != model.env_dim())
    throw DimensionError("display or environment vector has the wrong dimension");
  if (std::abs(phi.norm() - 1.0) > 1e-9 || std::abs(xi.norm() - 1.0) > 1e-9)
    throw InvariantViolation("display and environment states must be normalized");
  if (!(hbar > 0)) throw DimensionError("hbar must be positive");

  const Eigen::Index d = model.env_dim();
  const Complex factor(0.0, -t / hbar);
  Vector out(model.display_dim() * d);
  for (Eigen::Index n = 0; n < model.sectors(); ++n) {
    const Eigen::Index off = model.sector_offset(n), kn = model.sector_dim(n);
    Vector u(kn * d);
    for (Eigen::Index j = 0; j < kn; ++j) u.segment(j * d, d) = phi[off + j] * xi;
    if (u.norm() > 0 && t != 0.0) u = expm_multiply(model.sector_hamiltonian(n), u, factor);
    out.segment(off * d, kn * d) = u;
  }
  if (std::abs(out.norm() - 1.0) > 1e-9)
    throw InvariantViolation(fmt("evolution drifted the norm to %g", out.norm()));
  return out;
}

DensityOperator reduced_display(const Vector& state, const SectorModel& model) {
  const Eigen::Index k = model.display_dim(), d = model.env_dim();
  if (state.size() != k * d)
    throw DimensionError("state does not match display x environment");
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      s(state.data(), k, d);
  Matrix rho = s * s.adjoint();
  // Round off the Hermitian residual so the constructor checks see an exact
  // Hermitian matrix.
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return DensityOperator(CompositeSpace({{"display", k}}), std::move(rho));
}

OffdiagBlock offdiag_block(const DensityOperator& rho, const SectorModel& model,
                           Eigen::Index a, Eigen::Index b) {
  if (rho.mat().rows() != model.display_dim())
    throw DimensionError("density does not match the display dimension");
  if (a < 0 || b < 0 || a >= model.sectors() || b >= model.sectors() || a == b)
    throw DimensionError("need two distinct sector indices");
  Matrix block = rho.mat().block(model.sector_offset(a), model.sector_offset(b),
                                 model.sector_dim(a), model.sector_dim(b));
  const double mx = block.size() ? block.cwiseAbs().maxCoeff() : 0.0;
  const double fro = block.norm();
  return OffdiagBlock{std::move(block), mx, fro};
}

DecoherenceReport definiteness_check(const DensityOperator& rho,
                                     const SectorModel& model) {
  DecoherenceReport rep;
  const Eigen::Index k = model.display_dim();
  if (rho.mat().rows() != k)
    throw DimensionError("density does not match the display dimension");
  rep.level_spacing_ref = 2.0 / (static_cast<double>(k) * static_cast<double>(k));

  for (Eigen::Index a = 0; a < model.sectors(); ++a)
    for (Eigen::Index b = a + 1; b < model.sectors(); ++b) {
      OffdiagBlock ob = offdiag_block(rho, model, a, b);
      rep.offdiag_max = std::max(rep.offdiag_max, ob.max_abs);
      rep.offdiag_fro = std::hypot(rep.offdiag_fro, ob.fro);
    }
  rep.offdiag_to_spacing = rep.offdiag_max / rep.level_spacing_ref;

  // Sector confinement of the weight-carrying eigenvectors. Null directions
  // are skipped: their basis within the kernel is arbitrary.
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
  std::vector<double> purities;
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    if (es.eigenvalues()[i] <= kEigenvalueFloor) continue;
    double best = 0;
    for (Eigen::Index n = 0; n < model.sectors(); ++n) {
      const double w =
          es.eigenvectors().col(i).segment(model.sector_offset(n), model.sector_dim(n))
              .squaredNorm();
      best = std::max(best, w);
    }
    purities.push_back(best);
  }
  rep.sector_purities.resize(static_cast<Eigen::Index>(purities.size()));
  for (std::size_t i = 0; i < purities.size(); ++i)
    rep.sector_purities[static_cast<Eigen::Index>(i)] = purities[i];
  rep.definite = rep.sector_purities.size() > 0 &&
                 rep.sector_purities.minCoeff() >= 0.99;
  return rep;
}

ScalingResult scaling_experiment(std::span<const Eigen::Index> env_dims, int trials,
                                 Eigen::Index k1, Eigen::Index k2, double beta,
                                 double t, std::uint64_t seed) {
  if (trials < 5) throw DimensionError("scaling experiment needs at least 5 trials");
  if (env_dims.size() < 2)
    throw DimensionError("scaling experiment needs at least two environment sizes");
  Rng master(seed);
  master.note_seed(seed);

  ScalingResult res;
  res.trials = trials;
  for (std::size_t di = 0; di < env_dims.size(); ++di) {
    const Eigen::Index d = env_dims[di];
    RealVector maxima(trials), fros(trials);
    for (int ti = 0; ti < trials; ++ti) {
      const std::uint64_t base = 2 * (static_cast<std::uint64_t>(di) * 100003 +
                                      static_cast<std::uint64_t>(ti));
      SectorModel model = build_sector_model(k1, k2, d, beta, master.derive(base));
      Rng state_rng(master.derive(base + 1));
      Vector phi(k1 + k2);
      phi.head(k1) = std::sqrt(0.7) * random_unit_vector(state_rng, k1);
      phi.tail(k2) = std::sqrt(0.3) * random_unit_vector(state_rng, k2);
      Vector xi = random_unit_vector(state_rng, d);
      Vector evolved = evolve_sector(model, phi, xi, t);
      OffdiagBlock ob = offdiag_block(reduced_display(evolved, model), model, 0, 1);
      maxima[ti] = ob.max_abs;
      fros[ti] = ob.fro;
    }
    ScalingPoint pt;
    pt.env_dim = d;
    pt.mean_offdiag_max = maxima.mean();
    pt.mean_offdiag_fro = fros.mean();
    const double n = static_cast<double>(trials);
    pt.se_offdiag_max = std::sqrt((maxima.array() - pt.mean_offdiag_max).square().sum() /
                                  (n - 1.0) / n);
    pt.se_offdiag_fro = std::sqrt((fros.array() - pt.mean_offdiag_fro).square().sum() /
                                  (n - 1.0) / n);
    res.points.push_back(pt);
  }

  // Least-squares slope in log-log coordinates.
  auto fit = [&](auto value) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(res.points.size());
    for (const ScalingPoint& pt : res.points) {
      const double x = std::log(static_cast<double>(pt.env_dim));
      const double y = std::log(value(pt));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  res.exponent_max = fit([](const ScalingPoint& p) { return p.mean_offdiag_max; });
  res.exponent_fro = fit([](const ScalingPoint& p) { return p.mean_offdiag_fro; });
  return res;
}

double haar_overlap_mean_sq(Eigen::Index dim, int trials, std::uint64_t seed) {
  if (dim < 1 || trials < 1) throw DimensionError("need a positive dimension and trials");
  Rng rng(seed);
  double acc = 0;
  for (int i = 0; i < trials; ++i) {
    Vector a = random_unit_vector(rng, dim);
    Vector b = random_unit_vector(rng, dim);
    acc += std::norm(a.dot(b));
  }
  return acc / static_cast<double>(trials);
}

}  // namespace modal
