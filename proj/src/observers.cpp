#include "observers.hpp"

#include <cmath>
#include <cstdio>

namespace modal {

namespace {

constexpr double kEntryTol = 1e-12;

Matrix kron2(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

JointOutcomeTable::JointOutcomeTable(RealMatrix p) : p_(std::move(p)) {
  double total = 0;
  for (Eigen::Index j = 0; j < p_.rows(); ++j)
    for (Eigen::Index k = 0; k < p_.cols(); ++k) {
      if (p_(j, k) < -kEntryTol) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "joint outcome table entry (%lld,%lld) = %g < 0",
                      static_cast<long long>(j), static_cast<long long>(k), p_(j, k));
        throw InvariantViolation(buf);
      }
      p_(j, k) = std::max(0.0, p_(j, k));
      total += p_(j, k);
    }
  if (std::abs(total - 1.0) > 1e-10)
    throw InvariantViolation("joint outcome table does not sum to 1");
}

JointOutcomeTable two_device_joint(const ObjectDensity& rho, const TransferFunctions& c1,
                                   const TransferFunctions& c2) {
  if (!rho.grid().same_grid(c1.grid()) || !rho.grid().same_grid(c2.grid()))
    throw DimensionError("two_device_joint: grids differ");
  const Eigen::Index n1 = c1.blocks(), n2 = c2.blocks(), m_dim = rho.grid().size();
  RealMatrix p = RealMatrix::Zero(n1, n2);
  for (Eigen::Index m = 0; m < m_dim; ++m) {
    const double w = rho.mat()(m, m).real() * rho.grid().dx();
    if (w == 0) continue;
    for (Eigen::Index j = 0; j < n1; ++j) {
      const double a = c1.values()(j, m) * c1.values()(j, m);
      if (a == 0) continue;
      for (Eigen::Index k = 0; k < n2; ++k) {
        const double b = c2.values()(k, m) * c2.values()(k, m);
        // a*b first: IEEE multiplication commutes, so swapping identical
        // devices transposes the table exactly.
        p(j, k) += w * (a * b);
      }
    }
  }
  return JointOutcomeTable(std::move(p));
}

double agreement_mass(const JointOutcomeTable& table, Eigen::Index window) {
  if (window < 0) throw DimensionError("agreement window must be >= 0");
  double s = 0;
  for (Eigen::Index j = 0; j < table.rows(); ++j)
    for (Eigen::Index k = 0; k < table.cols(); ++k)
      if (std::abs(j - k) <= window) s += table.p()(j, k);
  return s;
}

Matrix qubit_basis(double theta, double phi) {
  Matrix b(2, 2);
  const Complex ph = std::exp(Complex(0, phi));
  b(0, 0) = std::cos(theta / 2);
  b(1, 0) = ph * std::sin(theta / 2);
  b(0, 1) = -std::conj(ph) * std::sin(theta / 2);
  b(1, 1) = std::cos(theta / 2);
  return b;
}

EprReport epr_scenario(const Matrix& basis, std::uint64_t seed) {
  if (basis.rows() != 2 || basis.cols() != 2)
    throw DimensionError("measured basis must be 2x2");
  if ((basis.adjoint() * basis - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-10)
    throw InvariantViolation("measured basis is not orthonormal");

  CompositeSpace space({{"p1", 2}, {"p2", 2}, {"ptr", 2}});
  const Vector e0 = basis.col(0), e1 = basis.col(1);

  // Singlet written in the measured basis (it has this form in any basis).
  Vector amp = Vector::Zero(8);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j)
      amp[(i * 2 + j) * 2 + 0] = (e0[i] * e1[j] - e1[i] * e0[j]) * M_SQRT1_2;
  PureState before(space, amp);

  // Controlled shift of the pointer by the particle-1 basis state.
  Matrix x01(2, 2);
  x01 << 0, 1, 1, 0;
  const Matrix u = kron2(projector_onto(e0), Matrix::Identity(2, 2)) +
                   kron2(projector_onto(e1), x01);
  std::vector<std::string> p1_ptr = {"p1", "ptr"};
  PureState after = apply_unitary(before, u, p1_ptr);

  EprReport report;
  report.basis = basis;
  report.sampled_outcome = 0;

  std::vector<std::string> just_p2 = {"p2"};
  report.reduced_2_before = reduced_density(before, just_p2).mat();
  report.reduced_2_after = reduced_density(after, just_p2).mat();
  report.reduced_2_change =
      (report.reduced_2_after - report.reduced_2_before).cwiseAbs().maxCoeff();

  std::vector<std::string> pair = {"p1", "p2"};
  DensityOperator rho_before(space, (before.amp() * before.amp().adjoint()).eval());
  auto cands_before = self_state_candidates(rho_before, pair);
  report.relational_2_before = relational_state(cands_before[0].state, just_p2).mat();

  DensityOperator rho_after(space, (after.amp() * after.amp().adjoint()).eval());
  auto cands_after = self_state_candidates(rho_after, pair);
  report.pair_multiplicity_after = cands_after.empty() ? 0 : cands_after[0].multiplicity;

  for (int b = 0; b < 2; ++b) {
    EprOutcome out;
    out.pointer_value = b;

    Matrix ptr_proj = Matrix::Zero(2, 2);
    ptr_proj(b, b) = 1;
    Vector w = apply_subsystem_operator(after.amp(), space, ptr_proj, {"ptr"});
    out.probability = w.squaredNorm();
    if (out.probability <= 1e-14)
      throw ZeroProbabilityBranch("pointer outcome has zero probability");
    PureState cond(space, (w / std::sqrt(out.probability)).eval());
    out.particle2_state = reduced_density(cond, just_p2).mat();

    // Assignment rule on the disjoint pair/pointer systems: the pair holds
    // the partner product state exactly when the pointer shows b.
    const Vector ket_b = basis.col(b), ket_other = basis.col(1 - b);
    Vector pair_state(4);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) pair_state[i * 2 + j] = ket_b[i] * ket_other[j];
    Matrix ptr_proj_other = Matrix::Zero(2, 2);
    ptr_proj_other(1 - b, 1 - b) = 1;
    std::vector<Assignment> matched = {{pair, projector_onto(pair_state)},
                                       {{"ptr"}, ptr_proj}};
    std::vector<Assignment> mismatched = {{pair, projector_onto(pair_state)},
                                          {{"ptr"}, ptr_proj_other}};
    out.joint_matched = joint_assignment_probability(after, matched);
    out.joint_mismatched = joint_assignment_probability(after, mismatched);
    report.outcomes.push_back(std::move(out));
  }

  Rng rng(seed);
  report.sampled_outcome = rng.uniform() < report.outcomes[0].probability ? 0 : 1;
  return report;
}

}  // namespace modal
