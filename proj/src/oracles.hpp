#pragma once

// Independent reference computations. Every fast formula in the library has
// a slow counterpart here that builds the full post-measurement state as an
// explicit tensor (object x environment x receptors x displays) and extracts
// the quantity by brute-force reduction, sharing no code with the formula
// under test beyond the basic Hilbert-space machinery.

#include <cstdint>
#include <string>
#include <vector>

#include "decoherence.hpp"
#include "deloc.hpp"
#include "dynamics.hpp"
#include "photon.hpp"

namespace modal {

// Purification of an object density: amp(m, e) with sum_e amp amp* = dx-free
// physical density (unit trace). Column count = number of retained
// eigenvalues (> 1e-14).
Matrix purify_object_density(const ObjectDensity& rho);

// Display outcome distribution from the explicit entangled state.
RealVector oracle_display_probabilities(const ObjectDensity& rho, const TransferFunctions& tf);

// Same with recoil: the non-orthogonal post-recoil object states are
// realized as concrete vectors whose Gram matrix equals the kernel, the
// state is normalized, and the display populations are read off.
RealVector oracle_display_probabilities_recoil(const ObjectDensity& rho,
                                               const TransferFunctions& tf,
                                               const RecoilKernel& kernel);

// Object density (library dx convention) after tracing photon and
// environment out of the explicit entangled state.
Matrix oracle_object_after_light(const ObjectDensity& rho, const TransferFunctions& tf);

// Object density (library dx convention) conditioned on display j showing
// the hit, from the explicit entangled state.
Matrix oracle_relational_object_state(const ObjectDensity& rho, const TransferFunctions& tf,
                                      Eigen::Index j);

// Display reduced density from the explicit branch expansion with receptor
// states kept as a separate orthonormal factor.
DensityOperator oracle_generic_display_density(const std::vector<MeasurementBranch>& branches);

// Joint distribution of two displays watching one object, from the explicit
// six-factor entangled state and the simultaneous-assignment rule.
RealMatrix oracle_two_device_joint(const ObjectDensity& rho, const TransferFunctions& c1,
                                   const TransferFunctions& c2);

// Two-time joint distribution from the explicit state of object plus two
// sequential device pairs, probabilities via the assignment rule.
RealMatrix oracle_two_time_joint(const Vector& psi0, const TransferFunctions& tf,
                                 const Propagator& g);

// Third-measurement conditional from the explicit three-device state:
// P(j,k,n) / P(j,k), both via the assignment rule.
RealVector oracle_third_conditional(const Vector& psi0, const TransferFunctions& tf,
                                    const Propagator& g_t, const Propagator& g_t_prime,
                                    Eigen::Index j, Eigen::Index k);

// Joint outcome distribution for the delocalized device, from the explicit
// object x device x receptors x displays state and the assignment rule.
RealMatrix oracle_deloc_joint(const JointObjectDeviceState& state,
                              const TransferFunctions& first,
                              const TransferFunctions& second);

// Relative-coordinate density via a different route: embed the conditioned
// pair state on a relative x center-of-mass product space and partial-trace
// the center of mass with the generic machinery. Optionally also returns
// the center-of-mass marginal.
Matrix oracle_relative_density(const JointObjectDeviceState& state,
                               const TransferFunctions& first,
                               const TransferFunctions& second, Eigen::Index j,
                               Eigen::Index k, RealVector* com_weights = nullptr);

// Display x environment evolution through one dense matrix exponential of
// the block-embedded full-space Hamiltonian, no sector shortcuts.
Vector oracle_full_space_evolution(const SectorModel& model, const Vector& phi,
                                   const Vector& xi, double t, double hbar = 1.0);

// Display reduction of a full state through the generic partial trace.
Matrix oracle_reduced_display(const SectorModel& model, const Vector& state);

// Off-sector density block as explicit inner products of the environment
// branch vectors sliced out of a full state.
Matrix oracle_branch_offdiag(const SectorModel& model, const Vector& state,
                             Eigen::Index a, Eigen::Index b);

struct OracleCheck {
  std::string name;
  double deviation;
  double tolerance;
  bool pass() const { return deviation <= tolerance; }
};

// Runs every oracle comparison at small dimensions with randomized inputs.
std::vector<OracleCheck> run_oracle_battery(std::uint64_t seed);

}  // namespace modal
