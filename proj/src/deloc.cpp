#include "deloc.hpp"

#include <cmath>
#include <cstdio>

namespace modal {

namespace {

constexpr double kBranchFloor = 1e-14;

std::string fmt(const char* tpl, double a, double b = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, tpl, a, b);
  return buf;
}

// d = m - n + (My - 1), the relative-grid cell holding x_m - y_n.
Eigen::Index rel_index(Eigen::Index m, Eigen::Index n, Eigen::Index my) {
  return m - n + my - 1;
}

void check_relative_tf(const TransferFunctions& tf, const ObjectGrid& rel,
                       const char* which) {
  if (!tf.grid().same_grid(rel))
    throw DimensionError(std::string(which) +
                         " transfer functions must live on the relative grid");
}

}  // namespace

JointObjectDeviceState::JointObjectDeviceState(const ObjectGrid& object,
                                               const ObjectGrid& device,
                                               Matrix amplitudes)
    : object_(object), device_(device), amp_(std::move(amplitudes)) {
  if (amp_.rows() != object.size() || amp_.cols() != device.size())
    throw DimensionError("joint amplitudes do not match the two grids");
  if (std::abs(object.dx() - device.dx()) > 1e-12 * object.dx())
    throw DimensionError(
        "object and device grids need a common spacing so x - y stays on a lattice");
  const double norm = amp_.squaredNorm() * object.dx() * device.dx();
  if (std::abs(norm - 1.0) > 1e-10)
    throw InvariantViolation(fmt("joint state norm is %g, expected 1", norm));
}

ObjectGrid relative_grid(const ObjectGrid& object, const ObjectGrid& device) {
  if (std::abs(object.dx() - device.dx()) > 1e-12 * object.dx())
    throw DimensionError("relative grid needs matching spacings");
  const double dx = object.dx();
  const double r_lo = object.position(0) - device.position(device.size() - 1);
  const Eigen::Index size = object.size() + device.size() - 1;
  return ObjectGrid(size, r_lo - 0.5 * dx, r_lo + (static_cast<double>(size) - 0.5) * dx);
}

JointOutcomeTable deloc_joint_prob(const JointObjectDeviceState& state,
                                   const TransferFunctions& first,
                                   const TransferFunctions& second) {
  const ObjectGrid rel = relative_grid(state.object_grid(), state.device_grid());
  check_relative_tf(first, rel, "first");
  check_relative_tf(second, rel, "second");

  const Eigen::Index mx = state.object_grid().size();
  const Eigen::Index my = state.device_grid().size();
  const double cell = state.object_grid().dx() * state.device_grid().dx();
  RealMatrix p = RealMatrix::Zero(first.blocks(), second.blocks());
  for (Eigen::Index m = 0; m < mx; ++m)
    for (Eigen::Index n = 0; n < my; ++n) {
      const double w = std::norm(state.amplitudes()(m, n)) * cell;
      if (w == 0.0) continue;
      const Eigen::Index d = rel_index(m, n, my);
      for (Eigen::Index j = 0; j < first.blocks(); ++j) {
        const double cj = first.values()(j, d);
        if (cj == 0.0) continue;
        for (Eigen::Index k = 0; k < second.blocks(); ++k) {
          const double ck = second.values()(k, d);
          p(j, k) += w * (cj * cj) * (ck * ck);
        }
      }
    }
  return JointOutcomeTable(p);
}

RelativeState relative_state(const JointObjectDeviceState& state,
                             const TransferFunctions& first,
                             const TransferFunctions& second, Eigen::Index j,
                             Eigen::Index k) {
  const ObjectGrid rel = relative_grid(state.object_grid(), state.device_grid());
  check_relative_tf(first, rel, "first");
  check_relative_tf(second, rel, "second");
  if (j < 0 || j >= first.blocks() || k < 0 || k >= second.blocks())
    throw DimensionError("outcome index out of range");

  const Eigen::Index mx = state.object_grid().size();
  const Eigen::Index my = state.device_grid().size();
  const double dx = state.object_grid().dx();

  // Condition on the two outcomes: both blocks respond to x - y.
  Matrix phi(mx, my);
  for (Eigen::Index m = 0; m < mx; ++m)
    for (Eigen::Index n = 0; n < my; ++n) {
      const Eigen::Index d = rel_index(m, n, my);
      phi(m, n) =
          state.amplitudes()(m, n) * first.values()(j, d) * second.values()(k, d);
    }
  const double prob = phi.squaredNorm() * dx * dx;
  if (prob <= kBranchFloor)
    throw ZeroProbabilityBranch(
        fmt("outcome pair (%g, %g) has no weight", static_cast<double>(j),
            static_cast<double>(k)));
  phi /= std::sqrt(prob);

  // Change variables to d = m - n (relative) and s = m + n (center of mass,
  // in half-steps). The trace over the center of mass only pairs cells with
  // equal s, and s has the parity of d, so entries with d - d' odd vanish
  // identically: the sublattices never meet.
  const Eigen::Index mr = rel.size();
  Matrix rho = Matrix::Zero(mr, mr);
  for (Eigen::Index d = 0; d < mr; ++d) {
    const Eigen::Index o = d - (my - 1);
    const Eigen::Index n_lo = std::max<Eigen::Index>(0, -o);
    const Eigen::Index n_hi = std::min(my - 1, mx - 1 - o);
    for (Eigen::Index d2 = d; d2 < mr; d2 += 2) {
      const Eigen::Index o2 = d2 - (my - 1);
      const Eigen::Index lo2 = std::max<Eigen::Index>(0, -o2);
      const Eigen::Index hi2 = std::min(my - 1, mx - 1 - o2);
      Complex acc = 0;
      for (Eigen::Index n = n_lo; n <= n_hi; ++n) {
        const Eigen::Index s = o + 2 * n;
        const Eigen::Index n2 = (s - o2) / 2;
        if (n2 < lo2 || n2 > hi2) continue;
        acc += phi(n + o, n) * std::conj(phi(n2 + o2, n2));
      }
      rho(d, d2) = dx * acc;
      rho(d2, d) = dx * std::conj(acc);
    }
  }

  // Center-of-mass marginal on the half-step lattice s = m + n.
  const Eigen::Index ms = mx + my - 1;
  const double x0 =
      0.5 * (state.object_grid().position(0) + state.device_grid().position(0));
  RealVector com_pos(ms), com_w = RealVector::Zero(ms);
  for (Eigen::Index s = 0; s < ms; ++s) com_pos[s] = x0 + 0.5 * dx * static_cast<double>(s);
  for (Eigen::Index m = 0; m < mx; ++m)
    for (Eigen::Index n = 0; n < my; ++n)
      com_w[m + n] += std::norm(phi(m, n)) * dx * dx;

  double com_mean = 0;
  for (Eigen::Index s = 0; s < ms; ++s) com_mean += com_pos[s] * com_w[s];
  double com_var = 0;
  for (Eigen::Index s = 0; s < ms; ++s) {
    const double c = com_pos[s] - com_mean;
    com_var += c * c * com_w[s];
  }

  ObjectDensity density(rel, std::move(rho));
  const double rel_width = position_std(density);
  return RelativeState{std::move(density), std::move(com_pos), std::move(com_w),
                       prob,               rel_width,          std::sqrt(com_var)};
}

}  // namespace modal
