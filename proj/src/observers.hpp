#pragma once

// Two devices watching the same object at once, and the two-particle
// (EPR-type) demonstration: a local measurement changes the state of the
// far particle relative to the pair while leaving its state with respect
// to itself untouched.

#include <cstdint>

#include "photon.hpp"
#include "relational.hpp"

namespace modal {

// Joint distribution over the two displays' outcomes.
class JointOutcomeTable {
 public:
  explicit JointOutcomeTable(RealMatrix p);
  const RealMatrix& p() const { return p_; }
  Eigen::Index rows() const { return p_.rows(); }
  Eigen::Index cols() const { return p_.cols(); }
  RealVector device1_marginal() const { return p_.rowwise().sum(); }
  RealVector device2_marginal() const { return p_.colwise().sum(); }

 private:
  RealMatrix p_;
};

// P(j,k) = dx * sum_m rho(m,m) c1_j(x_m)^2 c2_k(x_m)^2: both photons sample
// the same object coordinate, neither disturbs it.
JointOutcomeTable two_device_joint(const ObjectDensity& rho, const TransferFunctions& c1,
                                   const TransferFunctions& c2);

// Probability mass within |j - k| <= window of the diagonal: how strongly
// the two observers agree about where the object is.
double agreement_mass(const JointOutcomeTable& table, Eigen::Index window);

struct EprOutcome {
  int pointer_value;        // which indicator state the device shows
  double probability;
  Matrix particle2_state;   // state of the far particle relative to the pair
  double joint_matched;     // assignment-rule prob. of pair partner + this pointer
  double joint_mismatched;  // same with the wrong pointer value
};

struct EprReport {
  Matrix basis;                      // measured basis, columns e0, e1
  Matrix relational_2_before;        // far particle relative to the pair, pre-measurement
  Matrix reduced_2_before;           // far particle with respect to itself
  Matrix reduced_2_after;
  double reduced_2_change;           // max |before - after|
  Eigen::Index pair_multiplicity_after;  // degeneracy of the pair's post-candidate
  std::vector<EprOutcome> outcomes;
  int sampled_outcome;
};

// Universe = singlet pair + a two-state pointer; the measurement is a
// controlled shift of the pointer by the particle-1 basis state. The pair's
// post-measurement candidates are exactly degenerate (weights 1/2, 1/2), so
// outcomes are labeled by the pointer's built-in indicator basis; the
// assignment rule then exhibits the perfect pair-pointer correlation.
EprReport epr_scenario(const Matrix& basis, std::uint64_t seed);

// Orthonormal qubit basis at polar angle theta, azimuth phi.
Matrix qubit_basis(double theta, double phi = 0.0);

}  // namespace modal
