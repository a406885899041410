#include "relational.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace modal {

namespace {

constexpr double kProjectorTol = 1e-9;
constexpr double kProbabilitySlack = 1e-12;
constexpr double kTableSumTol = 1e-9;

void check_projector(const Matrix& p) {
  if (p.rows() != p.cols()) throw DimensionError("projector must be square");
  if ((p - p.adjoint()).cwiseAbs().maxCoeff() > kProjectorTol)
    throw InvariantViolation("assignment projector not hermitian");
  if ((p * p - p).cwiseAbs().maxCoeff() > kProjectorTol)
    throw InvariantViolation("assignment projector not idempotent");
}

void check_disjoint(std::span<const Assignment> assignments) {
  std::set<std::string> seen;
  for (const auto& a : assignments) {
    if (a.system.empty()) throw DimensionError("assignment names no subsystems");
    for (const auto& n : a.system)
      if (!seen.insert(n).second)
        throw OverlappingSystems("joint probabilities are undefined for overlapping systems ('" +
                                 n + "' appears twice)");
  }
}

double clamp_probability(double p) {
  if (p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack)
    throw InvariantViolation("assignment probability " + std::to_string(p) +
                             " outside [0,1] beyond tolerance");
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

std::vector<SelfStateCandidate> self_state_candidates(const DensityOperator& universe,
                                                      std::span<const std::string> system,
                                                      double degeneracy_tol) {
  DensityOperator reduced = partial_trace(universe, system);
  SpectralResolution res = spectral_resolution(reduced, degeneracy_tol);
  std::vector<SelfStateCandidate> out;
  out.reserve(res.entries.size());
  for (auto& e : res.entries) {
    SelfStateCandidate c{
        e.eigenvalue * static_cast<double>(e.multiplicity),
        e.eigenvalue,
        e.multiplicity,
        e.projector,
        DensityOperator(reduced.space(),
                        (e.projector / static_cast<double>(e.multiplicity)).eval()),
    };
    out.push_back(std::move(c));
  }
  return out;
}

DensityOperator relational_state(const DensityOperator& self_state_of_a,
                                 std::span<const std::string> s) {
  return partial_trace(self_state_of_a, s);
}

double joint_assignment_probability(const DensityOperator& universe,
                                    std::span<const Assignment> assignments) {
  check_disjoint(assignments);
  Matrix m = universe.mat();
  for (const auto& a : assignments) {
    check_projector(a.projector);
    Matrix next(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      next.col(j) = apply_subsystem_operator(m.col(j), universe.space(), a.projector, a.system);
    m = std::move(next);
  }
  return clamp_probability(m.trace().real());
}

double joint_assignment_probability(const PureState& universe,
                                    std::span<const Assignment> assignments) {
  check_disjoint(assignments);
  Vector v = universe.amp();
  for (const auto& a : assignments) {
    check_projector(a.projector);
    v = apply_subsystem_operator(v, universe.space(), a.projector, a.system);
  }
  return clamp_probability(universe.amp().dot(v).real());
}

AssignmentSampler::AssignmentSampler(const DensityOperator& universe,
                                     std::vector<std::vector<std::string>> partition,
                                     double degeneracy_tol)
    : partition_(std::move(partition)) {
  if (partition_.empty()) throw DimensionError("empty partition");
  {
    std::set<std::string> seen;
    for (const auto& cell : partition_)
      for (const auto& n : cell)
        if (!seen.insert(n).second)
          throw OverlappingSystems("partition cells overlap on '" + n + "'");
  }
  for (const auto& cell : partition_)
    candidates_.push_back(self_state_candidates(universe, cell, degeneracy_tol));

  Eigen::Index combos = 1;
  for (const auto& c : candidates_) combos *= static_cast<Eigen::Index>(c.size());
  table_.resize(static_cast<size_t>(combos));

  std::vector<Eigen::Index> choice(partition_.size(), 0);
  for (Eigen::Index flat = 0; flat < combos; ++flat) {
    Eigen::Index rem = flat;
    for (size_t i = partition_.size(); i-- > 0;) {
      const Eigen::Index n = static_cast<Eigen::Index>(candidates_[i].size());
      choice[i] = rem % n;
      rem /= n;
    }
    std::vector<Assignment> assignments;
    assignments.reserve(partition_.size());
    for (size_t i = 0; i < partition_.size(); ++i)
      assignments.push_back(
          {partition_[i], candidates_[i][static_cast<size_t>(choice[i])].projector});
    table_[static_cast<size_t>(flat)] = joint_assignment_probability(universe, assignments);
  }

  double sum = 0;
  cdf_.resize(table_.size());
  for (size_t i = 0; i < table_.size(); ++i) {
    sum += table_[i];
    cdf_[i] = sum;
  }
  if (std::abs(sum - 1.0) > kTableSumTol)
    throw InvariantViolation("joint assignment table sums to " + std::to_string(sum));
}

double AssignmentSampler::joint_probability(std::span<const Eigen::Index> choice) const {
  if (choice.size() != partition_.size()) throw DimensionError("choice length mismatch");
  Eigen::Index flat = 0;
  for (size_t i = 0; i < partition_.size(); ++i) {
    const Eigen::Index n = static_cast<Eigen::Index>(candidates_[i].size());
    if (choice[i] < 0 || choice[i] >= n) throw DimensionError("candidate index out of range");
    flat = flat * n + choice[i];
  }
  return table_[static_cast<size_t>(flat)];
}

std::vector<Eigen::Index> AssignmentSampler::sample(Rng& rng) const {
  const double u = rng.uniform();
  size_t flat = cdf_.size() - 1;
  for (size_t i = 0; i < cdf_.size(); ++i)
    if (u < cdf_[i]) {
      flat = i;
      break;
    }
  std::vector<Eigen::Index> choice(partition_.size(), 0);
  Eigen::Index rem = static_cast<Eigen::Index>(flat);
  for (size_t i = partition_.size(); i-- > 0;) {
    const Eigen::Index n = static_cast<Eigen::Index>(candidates_[i].size());
    choice[i] = rem % n;
    rem /= n;
  }
  return choice;
}

Matrix evolution_operator(const Matrix& hamiltonian, double t, double hbar) {
  if (hbar <= 0) throw DimensionError("hbar must be positive");
  const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
  if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvariantViolation("hamiltonian not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian);
  if (es.info() != Eigen::Success) throw InvariantViolation("eigendecomposition failed");
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    const double angle = -es.eigenvalues()[i] * t / hbar;
    phases[i] = Complex(std::cos(angle), std::sin(angle));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

DensityOperator evolve_closed(const DensityOperator& rho, const Matrix& hamiltonian,
                              double t, double hbar) {
  if (hamiltonian.rows() != rho.mat().rows())
    throw DimensionError("hamiltonian dimension mismatch");
  const Matrix u = evolution_operator(hamiltonian, t, hbar);
  Matrix out = u * rho.mat() * u.adjoint();
  // Symmetrize away the roundoff of the two-sided product.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(rho.space(), std::move(out));
}

PureState evolve_closed(const PureState& psi, const Matrix& hamiltonian, double t,
                        double hbar) {
  if (hamiltonian.rows() != psi.amp().size())
    throw DimensionError("hamiltonian dimension mismatch");
  const Matrix u = evolution_operator(hamiltonian, t, hbar);
  return PureState(psi.space(), u * psi.amp());
}

}  // namespace modal
