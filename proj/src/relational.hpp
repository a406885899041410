// State-assignment rules on a composite universe.
//
// A system's state with respect to itself is one of the eigenprojectors of
// its reduced density operator (candidates, with probability = eigenvalue x
// multiplicity). Its state with respect to an enclosing system follows by
// partial trace of that system's self-state. Simultaneous outcome
// probabilities exist only for pairwise disjoint systems; overlapping
// requests are rejected rather than answered.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "hilbert.hpp"
#include "rng.hpp"

namespace modal {

struct SelfStateCandidate {
  double probability = 0.0;  // eigenvalue * multiplicity
  double eigenvalue = 0.0;
  Eigen::Index multiplicity = 0;
  Matrix projector;       // on the system's joint space
  DensityOperator state;  // projector / multiplicity
};

std::vector<SelfStateCandidate> self_state_candidates(
    const DensityOperator& universe, std::span<const std::string> system,
    double degeneracy_tol = kDefaultDegeneracyTol);

// State of the subsystem S relative to a system A prepared in self_state_of_a
// (a density on A's space); S must name factors of A.
DensityOperator relational_state(const DensityOperator& self_state_of_a,
                                 std::span<const std::string> s);

struct Assignment {
  std::vector<std::string> system;  // factor names, order fixes projector layout
  Matrix projector;
};

// Probability that the listed disjoint systems simultaneously carry the given
// self-state projectors. Values in [-1e-12, 1+1e-12] are clamped to [0, 1];
// anything further out raises InvariantViolation.
double joint_assignment_probability(const DensityOperator& universe,
                                    std::span<const Assignment> assignments);
double joint_assignment_probability(const PureState& universe,
                                    std::span<const Assignment> assignments);

// Joint sampling of one candidate per partition cell, following the full
// joint distribution (not the product of marginals). Candidate order within
// each cell is descending eigenvalue; the joint table is lexicographic over
// cells and sampled by inverse CDF.
class AssignmentSampler {
 public:
  AssignmentSampler(const DensityOperator& universe,
                    std::vector<std::vector<std::string>> partition,
                    double degeneracy_tol = kDefaultDegeneracyTol);

  const std::vector<std::vector<SelfStateCandidate>>& candidates() const {
    return candidates_;
  }
  const std::vector<double>& joint_table() const { return table_; }
  double joint_probability(std::span<const Eigen::Index> choice) const;
  std::vector<Eigen::Index> sample(Rng& rng) const;

 private:
  std::vector<std::vector<std::string>> partition_;
  std::vector<std::vector<SelfStateCandidate>> candidates_;
  std::vector<double> table_;  // lexicographic, cells vary slowest-first
  std::vector<double> cdf_;
};

// Closed-system evolution rho -> U rho U^dagger with U = exp(-i H t / hbar).
DensityOperator evolve_closed(const DensityOperator& rho, const Matrix& hamiltonian,
                              double t, double hbar = 1.0);
PureState evolve_closed(const PureState& psi, const Matrix& hamiltonian, double t,
                        double hbar = 1.0);

// exp(-i H t / hbar) for hermitian H via eigendecomposition.
Matrix evolution_operator(const Matrix& hamiltonian, double t, double hbar = 1.0);

}  // namespace modal
