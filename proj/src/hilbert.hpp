// Finite-dimensional composite Hilbert spaces: labelled tensor factors,
// pure states and density operators, partial traces, spectral resolutions,
// Schmidt decompositions, and unitaries acting on named factors.
//
// Index convention: basis states are enumerated row-major over the declared
// subsystem order, i.e. the first declared subsystem is the most significant
// digit. tensor_product(a, b) therefore equals kron(a, b).

#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace modal {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kNormTol = 1e-10;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kDefaultDegeneracyTol = 1e-9;  // relative to largest eigenvalue
inline constexpr double kZeroProbTol = 1e-14;

struct Subsystem {
  std::string name;
  Eigen::Index dim = 0;
};

class CompositeSpace {
 public:
  CompositeSpace() = default;
  explicit CompositeSpace(std::vector<Subsystem> parts);

  Eigen::Index count() const { return static_cast<Eigen::Index>(parts_.size()); }
  const Subsystem& part(Eigen::Index i) const { return parts_[static_cast<size_t>(i)]; }
  const std::vector<Subsystem>& parts() const { return parts_; }
  Eigen::Index total_dim() const { return total_dim_; }

  bool contains(const std::string& name) const;
  // Position of a named factor; throws DimensionError when unknown.
  Eigen::Index index_of(const std::string& name) const;
  std::vector<Eigen::Index> indices_of(std::span<const std::string> names) const;

  // Stride of factor i in flat indices (product of dims of later factors).
  Eigen::Index stride(Eigen::Index i) const { return strides_[static_cast<size_t>(i)]; }

  // Sub-space of the named factors, keeping their relative order as declared
  // in this space.
  CompositeSpace subspace(std::span<const std::string> names) const;
  // All factors not in `names`, in declared order.
  std::vector<std::string> complement(std::span<const std::string> names) const;

  bool same_layout(const CompositeSpace& other) const;

 private:
  std::vector<Subsystem> parts_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index total_dim_ = 1;
};

// Flat-index offsets contributed by a factor subset. Entry k is the offset of
// joint index k, where k runs row-major over the subset in the order given.
std::vector<Eigen::Index> subset_offsets(const CompositeSpace& space,
                                         const std::vector<Eigen::Index>& subsystems);

class PureState {
 public:
  PureState(CompositeSpace space, Vector amplitudes);
  const CompositeSpace& space() const { return space_; }
  const Vector& amp() const { return amp_; }

 private:
  CompositeSpace space_;
  Vector amp_;
};

class DensityOperator {
 public:
  // Checks hermiticity, unit trace and nonnegative diagonal on construction;
  // the full spectral positivity check runs when dim <= psd_check_dim or via
  // validate_psd().
  DensityOperator(CompositeSpace space, Matrix mat,
                  Eigen::Index psd_check_dim = 256);
  const CompositeSpace& space() const { return space_; }
  const Matrix& mat() const { return mat_; }
  // Asserts the smallest eigenvalue is >= -1e-10 regardless of dimension.
  void validate_psd() const;

 private:
  CompositeSpace space_;
  Matrix mat_;
};

struct SpectralEntry {
  double eigenvalue = 0.0;  // multiplicity-weighted mean of the merged group
  Eigen::Index multiplicity = 0;
  Matrix projector;  // rank == multiplicity
  Matrix basis;      // dim x multiplicity orthonormal columns, phase-fixed
};

struct SpectralResolution {
  std::vector<SpectralEntry> entries;  // eigenvalues strictly descending
};

struct SchmidtTerm {
  double coeff = 0.0;
  Vector left;
  Vector right;
};

PureState tensor_product(const PureState& a, const PureState& b);

// Reduced density operator of the named factors (declared-order preserved).
DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const std::string> keep);

// Reduced density operator of a pure state, computed without materializing
// the full outer product.
DensityOperator reduced_density(const PureState& psi,
                                std::span<const std::string> keep);

// Spectral resolution of a density operator. Eigenvalues closer than
// degeneracy_tol * lambda_max are merged into one entry; projectors of all
// entries (kernel included) sum to the identity.
SpectralResolution spectral_resolution(const DensityOperator& rho,
                                       double degeneracy_tol = kDefaultDegeneracyTol);

// Schmidt decomposition across the bipartition (left = named factors,
// right = complement). Coefficients descending; terms below 1e-12 dropped.
std::vector<SchmidtTerm> schmidt_decompose(const PureState& psi,
                                           std::span<const std::string> left);

// Apply an operator on the joint space of the named factors (first name =
// most significant index of `op`) without checking unitarity.
Vector apply_subsystem_operator(const Vector& amp, const CompositeSpace& space,
                                const Matrix& op,
                                std::span<const std::string> on);

// Unitarity-checked (1e-10) application to states and density operators.
PureState apply_unitary(const PureState& psi, const Matrix& u,
                        std::span<const std::string> on);
DensityOperator apply_unitary(const DensityOperator& rho, const Matrix& u,
                              std::span<const std::string> on);

// Brace-literal conveniences for the name-list parameters above.
inline std::span<const std::string> names_of(std::initializer_list<std::string>& l) {
  return {l.begin(), l.size()};
}
inline DensityOperator partial_trace(const DensityOperator& rho,
                                     std::initializer_list<std::string> keep) {
  return partial_trace(rho, names_of(keep));
}
inline DensityOperator reduced_density(const PureState& psi,
                                       std::initializer_list<std::string> keep) {
  return reduced_density(psi, names_of(keep));
}
inline std::vector<SchmidtTerm> schmidt_decompose(const PureState& psi,
                                                  std::initializer_list<std::string> left) {
  return schmidt_decompose(psi, names_of(left));
}
inline Vector apply_subsystem_operator(const Vector& amp, const CompositeSpace& space,
                                       const Matrix& op,
                                       std::initializer_list<std::string> on) {
  return apply_subsystem_operator(amp, space, op, names_of(on));
}
inline PureState apply_unitary(const PureState& psi, const Matrix& u,
                               std::initializer_list<std::string> on) {
  return apply_unitary(psi, u, names_of(on));
}
inline DensityOperator apply_unitary(const DensityOperator& rho, const Matrix& u,
                                     std::initializer_list<std::string> on) {
  return apply_unitary(rho, u, names_of(on));
}

// Fix the global phase: largest-magnitude component becomes real positive.
Vector phase_fixed(const Vector& v);

// Convenience: projector onto a unit vector.
Matrix projector_onto(const Vector& v);

}  // namespace modal
