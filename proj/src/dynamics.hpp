#pragma once

// Sequential position measurements separated by free flight. The object is
// measured (block j), evolves freely for t, is measured again (block k);
// the conditional packets are localized in position and momentum and follow
// the classical free trajectory, which a third measurement checks.

#include "observers.hpp"
#include "photon.hpp"

namespace modal {

// Exact free evolution on the periodic grid: diagonal in the discrete
// momentum basis with phases exp(-i p^2 t / (2 m hbar)). The matrix acts
// directly on grid values and is unitary, so dx-weighted norms are
// preserved exactly.
class Propagator {
 public:
  Propagator(const ObjectGrid& grid, double mass, double t, double hbar = 1.0);

  const Matrix& mat() const { return g_; }
  const ObjectGrid& grid() const { return grid_; }
  double mass() const { return mass_; }
  double t() const { return t_; }
  double hbar() const { return hbar_; }
  Vector apply(const Vector& psi) const;

 private:
  ObjectGrid grid_;
  double mass_, t_, hbar_;
  Matrix g_;
};

// Free-particle action between measured endpoints and its x-derivative,
// whose value at the endpoints is the classical momentum.
struct ClassicalAction {
  double mass;
  double t;
  double s(double x, double x_prev) const;
  double ds_dx(double x, double x_prev) const;
};

// Conditional packet after outcomes (j, then k): c_k(x) [G (c_j psi0)](x),
// normalized. The branch weight is written to *probability if given.
Vector two_time_state(const Vector& psi0, const TransferFunctions& tf, Eigen::Index j,
                      const Propagator& g, Eigen::Index k, double* probability = nullptr);

// P(j,k) = dx sum_x c_k(x)^2 |[G (c_j psi0)](x)|^2.
JointOutcomeTable two_time_joint(const Vector& psi0, const TransferFunctions& tf,
                                 const Propagator& g);

// Distribution of a third measurement after a further free flight, given
// the first two outcomes.
RealVector third_conditional(const Vector& psi0, const TransferFunctions& tf,
                             const Propagator& g_t, const Propagator& g_t_prime,
                             Eigen::Index j, Eigen::Index k);

// Where a free classical particle that went x_j -> x_k in time t sits a
// further t_prime later.
double classical_endpoint(double x_j, double x_k, double t, double t_prime);

// Discrete momentum content of a packet; momenta are unwrapped around the
// distribution peak so mean and spread are meaningful on the torus.
struct MomentumDistribution {
  RealVector p;       // unwrapped momentum per mode
  RealVector prob;    // matching probabilities, sums to 1
  double peak;        // momentum of the most probable mode
  double mean;
  double spread;
  double dp;          // momentum grid step
};
MomentumDistribution momentum_distribution(const ObjectGrid& grid, const Vector& psi,
                                           double hbar = 1.0);

// Compares the packet's momentum peak with m (x_k - x_j) / t.
struct MomentumCheckResult {
  double p_peak;
  double p_classical;
  double spread;
  double dp;
};
MomentumCheckResult momentum_check(const ObjectGrid& grid, const Vector& psi_jk, double mass,
                                   double t, double x_j, double x_k, double hbar = 1.0);

}  // namespace modal
