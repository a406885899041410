#include "oracles.hpp"

#include <cmath>

#include "observers.hpp"
#include "relational.hpp"
#include "rng.hpp"

namespace modal {

namespace {

// The explicit entangled state of object, purifying environment, receptors
// and displays after the photon absorption: amplitude oe(m,e) c_j(m) on the
// branch where receptor j and display j fired.
PureState post_measurement_state(const ObjectDensity& rho, const TransferFunctions& tf) {
  const Matrix oe = purify_object_density(rho);
  const Eigen::Index m_dim = oe.rows(), e_dim = oe.cols(), n = tf.blocks();
  CompositeSpace space({{"O", m_dim}, {"E", e_dim}, {"R", n}, {"D", n}});
  Vector amp = Vector::Zero(space.total_dim());
  for (Eigen::Index m = 0; m < m_dim; ++m)
    for (Eigen::Index e = 0; e < e_dim; ++e)
      for (Eigen::Index j = 0; j < n; ++j)
        amp[((m * e_dim + e) * n + j) * n + j] = oe(m, e) * tf.values()(j, m);
  return PureState(space, std::move(amp));
}

}  // namespace

Matrix purify_object_density(const ObjectDensity& rho) {
  const Matrix phys = rho.mat() * rho.grid().dx();
  Eigen::SelfAdjointEigenSolver<Matrix> es(phys);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > 1e-14) keep.push_back(i);
  if (keep.empty()) throw InvariantViolation("object density has no positive weight");
  Matrix amp(phys.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k)
    amp.col(static_cast<Eigen::Index>(k)) =
        std::sqrt(es.eigenvalues()[keep[k]]) * es.eigenvectors().col(keep[k]);
  return amp;
}

RealVector oracle_display_probabilities(const ObjectDensity& rho, const TransferFunctions& tf) {
  PureState psi = post_measurement_state(rho, tf);
  DensityOperator d = reduced_density(psi, {"D"});
  return d.mat().diagonal().real();
}

RealVector oracle_display_probabilities_recoil(const ObjectDensity& rho,
                                               const TransferFunctions& tf,
                                               const RecoilKernel& kernel) {
  const Matrix oe = purify_object_density(rho);
  const Eigen::Index m_dim = oe.rows(), e_dim = oe.cols(), n = tf.blocks();

  // Concrete post-recoil object states with the prescribed Gram matrix:
  // xi_m = row m of U sqrt(mu), so <xi_m'|xi_m> = K(m, m').
  Eigen::SelfAdjointEigenSolver<Matrix> es(kernel.mat());
  RealVector mu = es.eigenvalues().cwiseMax(0.0);
  Matrix xi = es.eigenvectors() * mu.cwiseSqrt().asDiagonal();

  CompositeSpace space({{"O", m_dim}, {"E", e_dim}, {"R", n}, {"D", n}});
  Vector amp = Vector::Zero(space.total_dim());
  for (Eigen::Index e = 0; e < e_dim; ++e)
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector weighted(m_dim);
      for (Eigen::Index m = 0; m < m_dim; ++m)
        weighted[m] = oe(m, e) * tf.values()(j, m);
      const Vector obj = xi.transpose() * weighted;  // component on embedding index i
      for (Eigen::Index i = 0; i < m_dim; ++i)
        amp[((i * e_dim + e) * n + j) * n + j] += obj[i];
    }
  const double norm = amp.norm();
  if (norm < 1e-12) throw InvariantViolation("recoil oracle state vanished");
  PureState psi(space, amp / norm);
  return reduced_density(psi, {"D"}).mat().diagonal().real();
}

Matrix oracle_object_after_light(const ObjectDensity& rho, const TransferFunctions& tf) {
  PureState psi = post_measurement_state(rho, tf);
  return reduced_density(psi, {"O"}).mat() / rho.grid().dx();
}

Matrix oracle_relational_object_state(const ObjectDensity& rho, const TransferFunctions& tf,
                                      Eigen::Index j) {
  PureState psi = post_measurement_state(rho, tf);
  const Eigen::Index n = tf.blocks();
  Matrix proj = Matrix::Zero(n, n);
  proj(j, j) = 1;
  Vector w = apply_subsystem_operator(psi.amp(), psi.space(), proj, {"D"});
  const double p = w.squaredNorm();
  if (p <= 1e-14) throw ZeroProbabilityBranch("oracle: conditioning on a dead display");
  PureState cond(psi.space(), w / std::sqrt(p));
  return reduced_density(cond, {"O"}).mat() / rho.grid().dx();
}

DensityOperator oracle_generic_display_density(const std::vector<MeasurementBranch>& branches) {
  const Eigen::Index n = static_cast<Eigen::Index>(branches[0].bits.size());
  const Eigen::Index b_dim = static_cast<Eigen::Index>(branches.size());
  const Eigen::Index f_dim = branches[0].object_env.size();
  const Eigen::Index d_dim = Eigen::Index(1) << n;

  std::vector<Subsystem> parts = {{"OE", f_dim}, {"R", b_dim}};
  std::vector<std::string> display_names;
  for (Eigen::Index i = 0; i < n; ++i) {
    parts.push_back({"D" + std::to_string(i + 1), 2});
    display_names.push_back(parts.back().name);
  }
  CompositeSpace space(std::move(parts));

  Vector amp = Vector::Zero(space.total_dim());
  for (Eigen::Index b = 0; b < b_dim; ++b) {
    Eigen::Index bits_index = 0;
    for (int bit : branches[static_cast<size_t>(b)].bits) bits_index = bits_index * 2 + bit;
    const auto& br = branches[static_cast<size_t>(b)];
    for (Eigen::Index f = 0; f < f_dim; ++f)
      amp[(f * b_dim + b) * d_dim + bits_index] = br.amplitude * br.object_env[f];
  }
  PureState psi(space, std::move(amp));
  return reduced_density(psi, display_names);
}

RealMatrix oracle_two_device_joint(const ObjectDensity& rho, const TransferFunctions& c1,
                                   const TransferFunctions& c2) {
  const Matrix oe = purify_object_density(rho);
  const Eigen::Index m_dim = oe.rows(), e_dim = oe.cols();
  const Eigen::Index n1 = c1.blocks(), n2 = c2.blocks();
  CompositeSpace space(
      {{"O", m_dim}, {"E", e_dim}, {"R1", n1}, {"D1", n1}, {"R2", n2}, {"D2", n2}});
  Vector amp = Vector::Zero(space.total_dim());
  for (Eigen::Index m = 0; m < m_dim; ++m)
    for (Eigen::Index e = 0; e < e_dim; ++e)
      for (Eigen::Index j = 0; j < n1; ++j)
        for (Eigen::Index k = 0; k < n2; ++k)
          amp[((((m * e_dim + e) * n1 + j) * n1 + j) * n2 + k) * n2 + k] =
              oe(m, e) * c1.values()(j, m) * c2.values()(k, m);
  PureState psi(space, std::move(amp));

  RealMatrix p(n1, n2);
  for (Eigen::Index j = 0; j < n1; ++j)
    for (Eigen::Index k = 0; k < n2; ++k) {
      Matrix pj = Matrix::Zero(n1, n1), pk = Matrix::Zero(n2, n2);
      pj(j, j) = 1;
      pk(k, k) = 1;
      std::vector<Assignment> asg = {{{"D1"}, pj}, {{"D2"}, pk}};
      p(j, k) = joint_assignment_probability(psi, asg);
    }
  return p;
}

RealMatrix oracle_two_time_joint(const Vector& psi0, const TransferFunctions& tf,
                                 const Propagator& g) {
  const Eigen::Index m_dim = tf.grid().size(), n = tf.blocks();
  const double root_dx = std::sqrt(tf.grid().dx());
  CompositeSpace space({{"O", m_dim}, {"R1", n}, {"D1", n}, {"R2", n}, {"D2", n}});
  Vector amp = Vector::Zero(space.total_dim());
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector evolved =
        g.apply(psi0.cwiseProduct(tf.values().row(j).transpose().cast<Complex>()));
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index m = 0; m < m_dim; ++m)
        amp[(((m * n + j) * n + j) * n + k) * n + k] =
            root_dx * tf.values()(k, m) * evolved[m];
  }
  PureState psi(space, std::move(amp));

  RealMatrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      Matrix pj = Matrix::Zero(n, n), pk = Matrix::Zero(n, n);
      pj(j, j) = 1;
      pk(k, k) = 1;
      std::vector<Assignment> asg = {{{"D1"}, pj}, {{"D2"}, pk}};
      p(j, k) = joint_assignment_probability(psi, asg);
    }
  return p;
}

RealVector oracle_third_conditional(const Vector& psi0, const TransferFunctions& tf,
                                    const Propagator& g_t, const Propagator& g_t_prime,
                                    Eigen::Index j, Eigen::Index k) {
  const Eigen::Index m_dim = tf.grid().size(), n = tf.blocks();
  const double root_dx = std::sqrt(tf.grid().dx());
  CompositeSpace space(
      {{"O", m_dim}, {"R1", n}, {"D1", n}, {"R2", n}, {"D2", n}, {"R3", n}, {"D3", n}});
  Vector amp = Vector::Zero(space.total_dim());
  for (Eigen::Index a = 0; a < n; ++a) {
    Vector leg1 = g_t.apply(psi0.cwiseProduct(tf.values().row(a).transpose().cast<Complex>()));
    for (Eigen::Index b = 0; b < n; ++b) {
      Vector leg2 =
          g_t_prime.apply(leg1.cwiseProduct(tf.values().row(b).transpose().cast<Complex>()));
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index m = 0; m < m_dim; ++m)
          amp[(((((m * n + a) * n + a) * n + b) * n + b) * n + c) * n + c] =
              root_dx * tf.values()(c, m) * leg2[m];
    }
  }
  PureState psi(space, std::move(amp));

  auto outcome = [n](Eigen::Index i) {
    Matrix p = Matrix::Zero(n, n);
    p(i, i) = 1;
    return p;
  };
  std::vector<Assignment> pair = {{{"D1"}, outcome(j)}, {{"D2"}, outcome(k)}};
  const double p_jk = joint_assignment_probability(psi, pair);
  if (p_jk <= 1e-14) throw ZeroProbabilityBranch("oracle: two-time branch has no weight");
  RealVector q(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    std::vector<Assignment> triple = {
        {{"D1"}, outcome(j)}, {{"D2"}, outcome(k)}, {{"D3"}, outcome(c)}};
    q[c] = joint_assignment_probability(psi, triple) / p_jk;
  }
  return q;
}

RealMatrix oracle_deloc_joint(const JointObjectDeviceState& state,
                              const TransferFunctions& first,
                              const TransferFunctions& second) {
  const Eigen::Index mx = state.object_grid().size();
  const Eigen::Index my = state.device_grid().size();
  const Eigen::Index n1 = first.blocks(), n2 = second.blocks();
  const double root_cell = std::sqrt(state.object_grid().dx() * state.device_grid().dx());
  CompositeSpace space(
      {{"O", mx}, {"Y", my}, {"R1", n1}, {"D1", n1}, {"R2", n2}, {"D2", n2}});
  Vector amp = Vector::Zero(space.total_dim());
  for (Eigen::Index m = 0; m < mx; ++m)
    for (Eigen::Index n = 0; n < my; ++n) {
      const Eigen::Index d = m - n + my - 1;
      for (Eigen::Index j = 0; j < n1; ++j)
        for (Eigen::Index k = 0; k < n2; ++k)
          amp[((((m * my + n) * n1 + j) * n1 + j) * n2 + k) * n2 + k] =
              root_cell * state.amplitudes()(m, n) * first.values()(j, d) *
              second.values()(k, d);
    }
  PureState psi(space, std::move(amp));

  RealMatrix p(n1, n2);
  for (Eigen::Index j = 0; j < n1; ++j)
    for (Eigen::Index k = 0; k < n2; ++k) {
      Matrix pj = Matrix::Zero(n1, n1), pk = Matrix::Zero(n2, n2);
      pj(j, j) = 1;
      pk(k, k) = 1;
      std::vector<Assignment> asg = {{{"D1"}, pj}, {{"D2"}, pk}};
      p(j, k) = joint_assignment_probability(psi, asg);
    }
  return p;
}

Matrix oracle_relative_density(const JointObjectDeviceState& state,
                               const TransferFunctions& first,
                               const TransferFunctions& second, Eigen::Index j,
                               Eigen::Index k, RealVector* com_weights) {
  const Eigen::Index mx = state.object_grid().size();
  const Eigen::Index my = state.device_grid().size();
  const double dx = state.object_grid().dx();

  Matrix phi(mx, my);
  for (Eigen::Index m = 0; m < mx; ++m)
    for (Eigen::Index n = 0; n < my; ++n) {
      const Eigen::Index d = m - n + my - 1;
      phi(m, n) =
          state.amplitudes()(m, n) * first.values()(j, d) * second.values()(k, d);
    }
  const double prob = phi.squaredNorm() * dx * dx;
  if (prob <= 1e-14) throw ZeroProbabilityBranch("oracle: outcome pair has no weight");
  phi /= std::sqrt(prob);

  // Relabel (m, n) as (relative, center of mass); amplitudes scaled by the
  // cell so the embedded vector has unit norm, then let the generic partial
  // trace do the center-of-mass sum. Slots with no (m, n) preimage stay 0.
  const Eigen::Index mr = mx + my - 1, ms = mx + my - 1;
  CompositeSpace space({{"REL", mr}, {"COM", ms}});
  Vector amp = Vector::Zero(space.total_dim());
  for (Eigen::Index m = 0; m < mx; ++m)
    for (Eigen::Index n = 0; n < my; ++n)
      amp[(m - n + my - 1) * ms + (m + n)] = dx * phi(m, n);
  PureState psi(space, std::move(amp));

  if (com_weights) {
    DensityOperator com = reduced_density(psi, {"COM"});
    com_weights->resize(ms);
    for (Eigen::Index s = 0; s < ms; ++s) (*com_weights)[s] = com.mat()(s, s).real();
  }
  DensityOperator rel = reduced_density(psi, {"REL"});
  return rel.mat() / dx;
}

Vector oracle_full_space_evolution(const SectorModel& model, const Vector& phi,
                                   const Vector& xi, double t, double hbar) {
  const Eigen::Index k = model.display_dim(), d = model.env_dim();
  Matrix h = Matrix::Zero(k * d, k * d);
  for (Eigen::Index n = 0; n < model.sectors(); ++n) {
    const Eigen::Index off = model.sector_offset(n) * d;
    const Eigen::Index len = model.sector_dim(n) * d;
    h.block(off, off, len, len) = model.sector_hamiltonian(n);
  }
  Vector full(k * d);
  for (Eigen::Index a = 0; a < k; ++a) full.segment(a * d, d) = phi[a] * xi;

  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector coef = es.eigenvectors().adjoint() * full;
  const Complex factor(0.0, -t / hbar);
  for (Eigen::Index i = 0; i < coef.size(); ++i)
    coef[i] *= std::exp(factor * es.eigenvalues()[i]);
  return es.eigenvectors() * coef;
}

Matrix oracle_reduced_display(const SectorModel& model, const Vector& state) {
  const Eigen::Index k = model.display_dim(), d = model.env_dim();
  CompositeSpace space({{"display", k}, {"env", d}});
  PureState psi(space, state);
  return reduced_density(psi, {"display"}).mat();
}

Matrix oracle_branch_offdiag(const SectorModel& model, const Vector& state,
                             Eigen::Index a, Eigen::Index b) {
  const Eigen::Index d = model.env_dim();
  Matrix block(model.sector_dim(a), model.sector_dim(b));
  for (Eigen::Index j = 0; j < model.sector_dim(a); ++j)
    for (Eigen::Index l = 0; l < model.sector_dim(b); ++l) {
      const Vector va = state.segment((model.sector_offset(a) + j) * d, d);
      const Vector vb = state.segment((model.sector_offset(b) + l) * d, d);
      block(j, l) = vb.dot(va);
    }
  return block;
}

std::vector<OracleCheck> run_oracle_battery(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<OracleCheck> out;

  ObjectGrid grid(8, 0.0, 1.0);
  const double dx = grid.dx();
  TransferFunctions tf(grid, 3, 0.5 / 3.0);

  // Rank-3 mixed prior in the library's dx convention.
  Matrix phys = Matrix::Zero(8, 8);
  double wsum = 0;
  std::vector<double> weights = {0.5, 0.3, 0.2};
  for (double w : weights) {
    Vector v = random_unit_vector(rng, 8);
    phys += w * (v * v.adjoint()).eval();
    wsum += w;
  }
  ObjectDensity rho(grid, phys / (wsum * dx));

  {
    RealVector fast = display_probabilities(rho, tf);
    RealVector slow = oracle_display_probabilities(rho, tf);
    out.push_back({"display_probabilities_vs_full_tensor",
                   (fast - slow).cwiseAbs().maxCoeff(), 1e-10});
  }
  {
    RecoilKernel kernel = RecoilKernel::gaussian(grid, 0.15);
    RealVector fast = display_probabilities_recoil(rho, tf, kernel);
    RealVector slow = oracle_display_probabilities_recoil(rho, tf, kernel);
    out.push_back({"recoil_probabilities_vs_embedded_state",
                   (fast - slow).cwiseAbs().maxCoeff(), 1e-9});
  }
  {
    ObjectDensity fast = object_state_after_light(rho, tf);
    Matrix slow = oracle_object_after_light(rho, tf);
    out.push_back({"object_after_light_vs_partial_trace",
                   (fast.mat() - slow).cwiseAbs().maxCoeff() * dx, 1e-10});
  }
  {
    double dev = 0;
    RealVector p = display_probabilities(rho, tf);
    for (Eigen::Index j = 0; j < tf.blocks(); ++j) {
      if (p[j] < 1e-6) continue;
      ObjectDensity fast = relational_object_state(rho, tf, j);
      Matrix slow = oracle_relational_object_state(rho, tf, j);
      dev = std::max(dev, (fast.mat() - slow).cwiseAbs().maxCoeff() * dx);
    }
    out.push_back({"conditional_object_state_vs_conditioned_tensor", dev, 1e-10});
  }
  {
    TransferFunctions second(grid, 2, 0.3);
    JointOutcomeTable fast = two_device_joint(rho, tf, second);
    RealMatrix slow = oracle_two_device_joint(rho, tf, second);
    out.push_back({"two_device_joint_vs_assignment_rule",
                   (fast.p() - slow).cwiseAbs().maxCoeff(), 1e-10});
  }
  {
    Vector psi0 = random_unit_vector(rng, 8) / std::sqrt(dx);
    Propagator g(grid, 1.0, 0.7);
    Propagator g2(grid, 1.0, 0.4);
    JointOutcomeTable fast = two_time_joint(psi0, tf, g);
    RealMatrix slow = oracle_two_time_joint(psi0, tf, g);
    out.push_back({"two_time_joint_vs_sequential_tensor",
                   (fast.p() - slow).cwiseAbs().maxCoeff(), 1e-10});

    double dev = 0;
    for (Eigen::Index j = 0; j < 3; ++j)
      for (Eigen::Index k = 0; k < 3; ++k) {
        if (fast.p()(j, k) < 1e-8) continue;
        RealVector qf = third_conditional(psi0, tf, g, g2, j, k);
        RealVector qs = oracle_third_conditional(psi0, tf, g, g2, j, k);
        dev = std::max(dev, (qf - qs).cwiseAbs().maxCoeff());
      }
    out.push_back({"third_conditional_vs_three_device_tensor", dev, 1e-9});
  }
  {
    ObjectGrid gx(6, 0.0, 1.0), gy(6, 0.0, 1.0);
    Matrix psi_xy(6, 6);
    for (Eigen::Index m = 0; m < 6; ++m)
      for (Eigen::Index n = 0; n < 6; ++n) psi_xy(m, n) = rng.complex_normal();
    psi_xy /= std::sqrt(psi_xy.squaredNorm() * gx.dx() * gy.dx());
    JointObjectDeviceState pair(gx, gy, psi_xy);
    ObjectGrid rel = relative_grid(gx, gy);
    TransferFunctions c1(rel, 2, 0.5), c2(rel, 3, 0.35);

    JointOutcomeTable fast = deloc_joint_prob(pair, c1, c2);
    RealMatrix slow = oracle_deloc_joint(pair, c1, c2);
    out.push_back({"deloc_joint_vs_assignment_rule",
                   (fast.p() - slow).cwiseAbs().maxCoeff(), 1e-10});

    Eigen::Index bj = 0, bk = 0;
    fast.p().maxCoeff(&bj, &bk);
    RelativeState rs = relative_state(pair, c1, c2, bj, bk);
    RealVector com_slow;
    Matrix rho_slow = oracle_relative_density(pair, c1, c2, bj, bk, &com_slow);
    double dev = (rs.density.mat() - rho_slow).cwiseAbs().maxCoeff();
    dev = std::max(dev, (rs.com_weights - com_slow).cwiseAbs().maxCoeff());
    out.push_back({"relative_density_vs_partial_trace", dev, 1e-12});
  }
  {
    SectorModel model = build_sector_model(2, 2, 4, 0.8, rng.raw());
    Vector phi(4);
    phi.head(2) = std::sqrt(0.6) * random_unit_vector(rng, 2);
    phi.tail(2) = std::sqrt(0.4) * random_unit_vector(rng, 2);
    Vector xi = random_unit_vector(rng, 4);
    Vector fast = evolve_sector(model, phi, xi, 1.3);
    Vector slow = oracle_full_space_evolution(model, phi, xi, 1.3);
    out.push_back({"sector_evolution_vs_full_expm",
                   (fast - slow).cwiseAbs().maxCoeff(), 1e-10});

    DensityOperator rho = reduced_display(fast, model);
    out.push_back({"reduced_display_vs_partial_trace",
                   (rho.mat() - oracle_reduced_display(model, slow)).cwiseAbs().maxCoeff(),
                   1e-10});
    out.push_back({"offdiag_block_vs_branch_overlaps",
                   (offdiag_block(rho, model, 0, 1).block -
                    oracle_branch_offdiag(model, slow, 0, 1))
                       .cwiseAbs()
                       .maxCoeff(),
                   1e-11});
  }
  {
    std::vector<MeasurementBranch> branches;
    std::vector<std::vector<int>> bits = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}};
    Vector raw(4);
    for (Eigen::Index i = 0; i < 4; ++i) raw[i] = rng.complex_normal();
    raw /= raw.norm();
    for (size_t b = 0; b < bits.size(); ++b)
      branches.push_back({bits[b], raw[static_cast<Eigen::Index>(b)],
                          random_unit_vector(rng, 3)});
    DensityOperator fast = generic_display_density(branches);
    DensityOperator slow = oracle_generic_display_density(branches);
    out.push_back({"display_density_vs_branch_expansion",
                   (fast.mat() - slow.mat()).cwiseAbs().maxCoeff(), 1e-12});
  }

  return out;
}

}  // namespace modal
