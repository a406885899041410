#pragma once

// Position measurement by a device whose own center of mass is spread out.
// The coupling is translationally invariant, so the receptors only see the
// separation x - y between object and device. Outcomes then localize the
// relative coordinate while the pair as a whole can stay delocalized.

#include "observers.hpp"
#include "photon.hpp"

namespace modal {

// Joint wave function Psi(x_m, y_n) of object (rows) and device center of
// mass (columns), unit norm under the dx*dy weight. Both grids must share
// the same spacing so x - y lives on a lattice with the same step.
class JointObjectDeviceState {
 public:
  JointObjectDeviceState(const ObjectGrid& object, const ObjectGrid& device,
                         Matrix amplitudes);

  const ObjectGrid& object_grid() const { return object_; }
  const ObjectGrid& device_grid() const { return device_; }
  const Matrix& amplitudes() const { return amp_; }

 private:
  ObjectGrid object_;
  ObjectGrid device_;
  Matrix amp_;
};

// Grid carrying the relative coordinate x - y. Cell d holds the value
// object.position(0) - device.position(My-1) + d * dx, for d in
// [0, Mx + My - 2]; every difference of grid points lands on a cell center.
ObjectGrid relative_grid(const ObjectGrid& object, const ObjectGrid& device);

// P(j,k) that the first measurement fires block j and the second block k.
// Both transfer functions must live on relative_grid(object, device); the
// blocks respond to x - y only.
JointOutcomeTable deloc_joint_prob(const JointObjectDeviceState& state,
                                   const TransferFunctions& first,
                                   const TransferFunctions& second);

// The pair state conditioned on outcomes (j, k), rewritten in relative and
// center-of-mass coordinates with the center of mass traced out.
struct RelativeState {
  ObjectDensity density;     // on the relative grid, unit dx-trace
  RealVector com_positions;  // (x+y)/2 values, a half-step lattice
  RealVector com_weights;    // probability mass at each such value, sums to 1
  double probability;        // P(j,k) of the conditioning outcome pair
  double relative_width;     // std of the relative-coordinate distribution
  double com_width;          // std of the center-of-mass marginal
};

RelativeState relative_state(const JointObjectDeviceState& state,
                             const TransferFunctions& first,
                             const TransferFunctions& second, Eigen::Index j,
                             Eigen::Index k);

}  // namespace modal
