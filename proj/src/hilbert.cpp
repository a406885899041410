#include "hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace modal {

namespace {

// Index of the largest-magnitude component; first hit wins on ties so the
// choice is deterministic.
Eigen::Index argmax_abs(const Vector& v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  return best;
}

}  // namespace

CompositeSpace::CompositeSpace(std::vector<Subsystem> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw DimensionError("composite space needs at least one subsystem");
  std::set<std::string> seen;
  for (const auto& p : parts_) {
    if (p.name.empty()) throw DimensionError("subsystem name must be nonempty");
    if (p.dim < 1) throw DimensionError("subsystem '" + p.name + "' has dimension < 1");
    if (!seen.insert(p.name).second)
      throw DimensionError("subsystem name collision: '" + p.name + "'");
  }
  strides_.assign(parts_.size(), 1);
  total_dim_ = 1;
  for (size_t i = parts_.size(); i-- > 0;) {
    strides_[i] = total_dim_;
    total_dim_ *= parts_[i].dim;
  }
}

bool CompositeSpace::contains(const std::string& name) const {
  for (const auto& p : parts_)
    if (p.name == name) return true;
  return false;
}

Eigen::Index CompositeSpace::index_of(const std::string& name) const {
  for (size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].name == name) return static_cast<Eigen::Index>(i);
  throw DimensionError("unknown subsystem '" + name + "'");
}

std::vector<Eigen::Index> CompositeSpace::indices_of(std::span<const std::string> names) const {
  std::vector<Eigen::Index> out;
  out.reserve(names.size());
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw DimensionError("subsystem '" + n + "' listed twice");
    out.push_back(index_of(n));
  }
  return out;
}

CompositeSpace CompositeSpace::subspace(std::span<const std::string> names) const {
  auto idx = indices_of(names);  // validates
  std::sort(idx.begin(), idx.end());
  std::vector<Subsystem> sel;
  sel.reserve(idx.size());
  for (auto i : idx) sel.push_back(parts_[static_cast<size_t>(i)]);
  return CompositeSpace(std::move(sel));
}

std::vector<std::string> CompositeSpace::complement(std::span<const std::string> names) const {
  indices_of(names);  // validate names exist
  std::set<std::string> in(names.begin(), names.end());
  std::vector<std::string> out;
  for (const auto& p : parts_)
    if (!in.count(p.name)) out.push_back(p.name);
  return out;
}

bool CompositeSpace::same_layout(const CompositeSpace& other) const {
  if (parts_.size() != other.parts_.size()) return false;
  for (size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].name != other.parts_[i].name || parts_[i].dim != other.parts_[i].dim)
      return false;
  return true;
}

std::vector<Eigen::Index> subset_offsets(const CompositeSpace& space,
                                         const std::vector<Eigen::Index>& subsystems) {
  Eigen::Index joint = 1;
  for (auto s : subsystems) joint *= space.part(s).dim;
  std::vector<Eigen::Index> offsets(static_cast<size_t>(std::max<Eigen::Index>(joint, 1)), 0);
  Eigen::Index repeat = 1;  // how often each digit value repeats contiguously
  for (size_t pos = subsystems.size(); pos-- > 0;) {
    const Eigen::Index s = subsystems[pos];
    const Eigen::Index d = space.part(s).dim;
    const Eigen::Index stride = space.stride(s);
    for (Eigen::Index k = 0; k < joint; ++k) {
      const Eigen::Index digit = (k / repeat) % d;
      offsets[static_cast<size_t>(k)] += digit * stride;
    }
    repeat *= d;
  }
  return offsets;
}

PureState::PureState(CompositeSpace space, Vector amplitudes)
    : space_(std::move(space)), amp_(std::move(amplitudes)) {
  if (amp_.size() != space_.total_dim())
    throw DimensionError("amplitude vector length does not match space dimension");
  const double n = amp_.norm();
  if (std::abs(n - 1.0) > kNormTol)
    throw InvariantViolation("pure state norm deviates from 1 by " + std::to_string(n - 1.0));
}

DensityOperator::DensityOperator(CompositeSpace space, Matrix mat, Eigen::Index psd_check_dim)
    : space_(std::move(space)), mat_(std::move(mat)) {
  const Eigen::Index n = space_.total_dim();
  if (mat_.rows() != n || mat_.cols() != n)
    throw DimensionError("density matrix shape does not match space dimension");
  const double herm = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol)
    throw InvariantViolation("density operator not hermitian (dev " + std::to_string(herm) + ")");
  const Complex tr = mat_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol)
    throw InvariantViolation("density operator trace deviates from 1");
  for (Eigen::Index i = 0; i < n; ++i)
    if (mat_(i, i).real() < -kPsdTol)
      throw InvariantViolation("density operator has negative diagonal entry");
  if (n <= psd_check_dim) validate_psd();
}

void DensityOperator::validate_psd() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw InvariantViolation("density operator not positive semidefinite (min eig " +
                             std::to_string(es.eigenvalues().minCoeff()) + ")");
}

PureState tensor_product(const PureState& a, const PureState& b) {
  std::vector<Subsystem> parts = a.space().parts();
  for (const auto& p : b.space().parts()) {
    if (a.space().contains(p.name))
      throw DimensionError("tensor product name collision: '" + p.name + "'");
    parts.push_back(p);
  }
  CompositeSpace space(std::move(parts));
  Vector amp(space.total_dim());
  const Eigen::Index nb = b.space().total_dim();
  for (Eigen::Index i = 0; i < a.space().total_dim(); ++i)
    amp.segment(i * nb, nb) = a.amp()[i] * b.amp();
  return PureState(std::move(space), std::move(amp));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::string> keep) {
  if (keep.empty()) throw DimensionError("partial trace must keep at least one subsystem");
  const CompositeSpace& space = rho.space();
  auto keep_idx = space.indices_of(keep);
  std::sort(keep_idx.begin(), keep_idx.end());
  std::vector<Eigen::Index> traced;
  for (Eigen::Index i = 0; i < space.count(); ++i)
    if (!std::binary_search(keep_idx.begin(), keep_idx.end(), i)) traced.push_back(i);

  const auto off_k = subset_offsets(space, keep_idx);
  const auto off_t = subset_offsets(space, traced);
  const Eigen::Index dk = static_cast<Eigen::Index>(off_k.size());

  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      Complex acc(0.0, 0.0);
      for (const auto e : off_t) acc += rho.mat()(off_k[static_cast<size_t>(a)] + e,
                                                  off_k[static_cast<size_t>(b)] + e);
      out(a, b) = acc;
    }

  std::vector<std::string> keep_names;
  for (auto i : keep_idx) keep_names.push_back(space.part(i).name);
  return DensityOperator(space.subspace(keep_names), std::move(out));
}

DensityOperator reduced_density(const PureState& psi, std::span<const std::string> keep) {
  if (keep.empty()) throw DimensionError("reduced density must keep at least one subsystem");
  const CompositeSpace& space = psi.space();
  auto keep_idx = space.indices_of(keep);
  std::sort(keep_idx.begin(), keep_idx.end());
  std::vector<Eigen::Index> traced;
  for (Eigen::Index i = 0; i < space.count(); ++i)
    if (!std::binary_search(keep_idx.begin(), keep_idx.end(), i)) traced.push_back(i);

  const auto off_k = subset_offsets(space, keep_idx);
  const auto off_t = subset_offsets(space, traced);
  const Eigen::Index dk = static_cast<Eigen::Index>(off_k.size());
  const Eigen::Index dt = static_cast<Eigen::Index>(off_t.size());

  Matrix slab(dk, dt);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index e = 0; e < dt; ++e)
      slab(a, e) = psi.amp()[off_k[static_cast<size_t>(a)] + off_t[static_cast<size_t>(e)]];
  Matrix out = slab * slab.adjoint();

  std::vector<std::string> keep_names;
  for (auto i : keep_idx) keep_names.push_back(space.part(i).name);
  return DensityOperator(space.subspace(keep_names), std::move(out));
}

SpectralResolution spectral_resolution(const DensityOperator& rho, double degeneracy_tol) {
  if (degeneracy_tol < 0) throw DimensionError("degeneracy tolerance must be >= 0");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
  if (es.info() != Eigen::Success) throw InvariantViolation("eigendecomposition failed");
  const Eigen::Index n = rho.mat().rows();

  // Ascending from Eigen; reorder to descending.
  RealVector lam(n);
  Matrix vec(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    lam[i] = es.eigenvalues()[n - 1 - i];
    vec.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  if (lam[n - 1] < -kPsdTol)
    throw InvariantViolation("spectral resolution of non-positive operator");
  for (Eigen::Index i = 0; i < n; ++i) lam[i] = std::clamp(lam[i], 0.0, 1.0);

  const double tol_abs = degeneracy_tol * std::max(lam[0], 1e-300);
  SpectralResolution res;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && lam[stop - 1] - lam[stop] <= tol_abs) ++stop;
    const Eigen::Index mult = stop - start;
    SpectralEntry entry;
    entry.multiplicity = mult;
    entry.eigenvalue = lam.segment(start, mult).mean();
    entry.basis = Matrix(n, mult);
    for (Eigen::Index k = 0; k < mult; ++k)
      entry.basis.col(k) = phase_fixed(vec.col(start + k));
    entry.projector = entry.basis * entry.basis.adjoint();
    res.entries.push_back(std::move(entry));
    start = stop;
  }
  return res;
}

std::vector<SchmidtTerm> schmidt_decompose(const PureState& psi,
                                           std::span<const std::string> left) {
  const CompositeSpace& space = psi.space();
  if (left.empty()) throw DimensionError("schmidt bipartition: left side is empty");
  auto left_idx = space.indices_of(left);
  std::sort(left_idx.begin(), left_idx.end());
  if (static_cast<Eigen::Index>(left_idx.size()) == space.count())
    throw DimensionError("schmidt bipartition: right side is empty");
  std::vector<Eigen::Index> right_idx;
  for (Eigen::Index i = 0; i < space.count(); ++i)
    if (!std::binary_search(left_idx.begin(), left_idx.end(), i)) right_idx.push_back(i);

  const auto off_l = subset_offsets(space, left_idx);
  const auto off_r = subset_offsets(space, right_idx);
  Matrix a(static_cast<Eigen::Index>(off_l.size()), static_cast<Eigen::Index>(off_r.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      a(i, j) = psi.amp()[off_l[static_cast<size_t>(i)] + off_r[static_cast<size_t>(j)]];

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  std::vector<SchmidtTerm> terms;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double s = svd.singularValues()[k];
    if (s < 1e-12) continue;
    SchmidtTerm t;
    t.coeff = s;
    t.left = svd.matrixU().col(k);
    t.right = svd.matrixV().col(k).conjugate();
    // Phase-fix the left vector; move the compensating phase to the right so
    // the term coeff * left (x) right is unchanged.
    const Eigen::Index p = argmax_abs(t.left);
    const Complex z = t.left[p];
    const Complex phase = std::conj(z) / std::abs(z);
    t.left *= phase;
    t.right *= std::conj(phase);
    terms.push_back(std::move(t));
  }
  return terms;
}

Vector apply_subsystem_operator(const Vector& amp, const CompositeSpace& space,
                                const Matrix& op, std::span<const std::string> on) {
  auto idx = space.indices_of(on);  // order as given by caller
  Eigen::Index dop = 1;
  for (auto i : idx) dop *= space.part(i).dim;
  if (op.rows() != dop || op.cols() != dop)
    throw DimensionError("operator shape does not match the named subsystems");

  std::vector<Eigen::Index> rest;
  {
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    for (Eigen::Index i = 0; i < space.count(); ++i)
      if (!std::binary_search(sorted.begin(), sorted.end(), i)) rest.push_back(i);
  }
  const auto off_op = subset_offsets(space, idx);
  const auto off_rest = subset_offsets(space, rest);

  Vector out = Vector::Zero(amp.size());
  Vector slice(dop);
  for (const auto r : off_rest) {
    for (Eigen::Index c = 0; c < dop; ++c) slice[c] = amp[off_op[static_cast<size_t>(c)] + r];
    Vector res = op * slice;
    for (Eigen::Index c = 0; c < dop; ++c) out[off_op[static_cast<size_t>(c)] + r] = res[c];
  }
  return out;
}

namespace {

void check_unitary(const Matrix& u) {
  const double dev = (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols()))
                         .cwiseAbs()
                         .maxCoeff();
  if (dev > kNormTol)
    throw InvariantViolation("operator not unitary (dev " + std::to_string(dev) + ")");
}

}  // namespace

PureState apply_unitary(const PureState& psi, const Matrix& u,
                        std::span<const std::string> on) {
  check_unitary(u);
  return PureState(psi.space(), apply_subsystem_operator(psi.amp(), psi.space(), u, on));
}

DensityOperator apply_unitary(const DensityOperator& rho, const Matrix& u,
                              std::span<const std::string> on) {
  check_unitary(u);
  const Eigen::Index n = rho.mat().rows();
  Matrix tmp(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    tmp.col(j) = apply_subsystem_operator(rho.mat().col(j), rho.space(), u, on);
  Matrix tadj = tmp.adjoint();
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    out.col(j) = apply_subsystem_operator(tadj.col(j), rho.space(), u, on);
  return DensityOperator(rho.space(), out.adjoint());
}

Vector phase_fixed(const Vector& v) {
  const Eigen::Index p = argmax_abs(v);
  const double mag = std::abs(v[p]);
  if (mag == 0.0) return v;
  return v * (std::conj(v[p]) / mag);
}

Matrix projector_onto(const Vector& v) { return v * v.adjoint(); }

}  // namespace modal
