#pragma once

// Display-environment coupling that never mixes display sectors: the
// Hamiltonian is block diagonal over sectors, each block a random Hermitian
// operator on sector x environment. Coherences between sectors then decay
// like overlaps of independently scrambled environment vectors, and the
// reduced display density develops eigenvectors confined to one sector.

#include <cstdint>
#include <span>
#include <vector>

#include "hilbert.hpp"

namespace modal {

class SectorModel {
 public:
  // One Hermitian (dim_n * env_dim)-square matrix per sector, display-major
  // indexing within the block: row (j * env_dim + e). beta is recorded for
  // reporting; the matrices are stored already scaled.
  SectorModel(std::vector<Eigen::Index> sector_dims, Eigen::Index env_dim,
              std::vector<Matrix> sector_hamiltonians, double beta);

  Eigen::Index sectors() const { return static_cast<Eigen::Index>(dims_.size()); }
  Eigen::Index sector_dim(Eigen::Index n) const { return dims_[n]; }
  std::span<const Eigen::Index> sector_dims() const { return dims_; }
  // First display index of sector n.
  Eigen::Index sector_offset(Eigen::Index n) const { return offsets_[n]; }
  Eigen::Index display_dim() const { return k_total_; }
  Eigen::Index env_dim() const { return env_dim_; }
  double beta() const { return beta_; }
  const Matrix& sector_hamiltonian(Eigen::Index n) const { return h_[n]; }

 private:
  std::vector<Eigen::Index> dims_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index env_dim_, k_total_;
  double beta_;
  std::vector<Matrix> h_;
};

// Two sectors of dims k1 and k2; every block entry is an independent
// Gaussian Hermitian with entry scale beta/sqrt(env_dim), so the spectral
// width of each sector Hamiltonian does not grow with the environment.
SectorModel build_sector_model(Eigen::Index k1, Eigen::Index k2, Eigen::Index env_dim,
                               double beta, std::uint64_t seed);

// n_displays displays, each with a fired and an unfired subspace of
// dimension per_display_dim: 2^n_displays sectors of dimension
// per_display_dim^n_displays. With one display this is exactly
// build_sector_model(k, k, ...). Total display x environment dimension is
// capped at 2^14.
SectorModel multi_display_model(Eigen::Index n_displays, Eigen::Index per_display_dim,
                                Eigen::Index env_dim, double beta, std::uint64_t seed);

// e^{-i t H / hbar} applied sector by sector to phi (x) xi; phi lives on the
// K-dim display space, xi on the environment. Display-major output of
// dimension K * env_dim.
Vector evolve_sector(const SectorModel& model, const Vector& phi, const Vector& xi,
                     double t, double hbar = 1.0);

// Environment traced out of a full display (x) environment vector.
DensityOperator reduced_display(const Vector& state, const SectorModel& model);

struct OffdiagBlock {
  Matrix block;    // rows sector a, columns sector b
  double max_abs;  // largest entry magnitude
  double fro;      // Frobenius norm
};

// The (a, b) off-sector block of a display density. Each entry equals the
// inner product of the two environment branch vectors attached to the
// corresponding display basis states.
OffdiagBlock offdiag_block(const DensityOperator& rho, const SectorModel& model,
                           Eigen::Index a = 0, Eigen::Index b = 1);

struct DecoherenceReport {
  double offdiag_max = 0;        // over all sector pairs
  double offdiag_fro = 0;
  RealVector sector_purities;    // per eigenvector, max squared sector projection
  double level_spacing_ref = 0;  // 2 / K^2, the equidistant-spectrum spacing
  double offdiag_to_spacing = 0; // offdiag_max / level_spacing_ref, diagnostic
  bool definite = false;         // every eigenvector purity >= 0.99
};

// Eigenvectors of the display density tested for confinement to a single
// sector. The verdict is carried by the purities; the off-diagonal magnitude
// relative to the 2/K^2 spacing is reported alongside as the analytic
// indicator it approximates.
DecoherenceReport definiteness_check(const DensityOperator& rho, const SectorModel& model);

struct ScalingPoint {
  Eigen::Index env_dim = 0;
  double mean_offdiag_max = 0, se_offdiag_max = 0;
  double mean_offdiag_fro = 0, se_offdiag_fro = 0;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  double exponent_max = 0;  // log-log slope of mean_offdiag_max vs env_dim
  double exponent_fro = 0;
  int trials = 0;
};

// Fresh random model per (env_dim, trial); display state with sector
// populations 0.7 / 0.3 and random directions, random environment vector,
// evolved to time t, off-diagonal statistics accumulated and a power law
// fitted. Needs at least 5 trials for the standard errors to mean anything.
ScalingResult scaling_experiment(std::span<const Eigen::Index> env_dims, int trials,
                                 Eigen::Index k1, Eigen::Index k2, double beta,
                                 double t, std::uint64_t seed);

// Monte Carlo E|<a|b>|^2 for independent Haar unit vectors; approaches
// 1/dim. The baseline the off-diagonal suppression is compared against.
double haar_overlap_mean_sq(Eigen::Index dim, int trials, std::uint64_t seed);

}  // namespace modal
