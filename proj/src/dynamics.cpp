#include "dynamics.hpp"

#include <cmath>

namespace modal {

namespace {

constexpr double kBranchFloor = 1e-14;

void check_wavefunction(const ObjectGrid& grid, const Vector& psi) {
  if (psi.size() != grid.size()) throw DimensionError("wave function does not match grid");
  const double n2 = psi.squaredNorm() * grid.dx();
  if (std::abs(n2 - 1.0) > 1e-9)
    throw InvariantViolation("wave function is not dx-normalized");
}

// Signed momentum index: modes 0..M-1 stand for wavenumbers -M/2..M/2-1.
double signed_mode(Eigen::Index k, Eigen::Index m) {
  return static_cast<double>(k < (m + 1) / 2 ? k : k - m);
}

}  // namespace

Propagator::Propagator(const ObjectGrid& grid, double mass, double t, double hbar)
    : grid_(grid), mass_(mass), t_(t), hbar_(hbar) {
  if (!(mass > 0)) throw DimensionError("mass must be positive");
  if (t < 0) throw DimensionError("propagation time must be >= 0");
  if (!(hbar > 0)) throw DimensionError("hbar must be positive");

  const Eigen::Index m = grid.size();
  const double span = grid.x_max() - grid.x_min();
  const double dp = 2.0 * M_PI * hbar / span;

  // Circulant kernel: g[d] = (1/M) sum_k exp(-i p_k^2 t / (2 m hbar))
  // exp(2 pi i k d / M), then G(a,b) = g[(a-b) mod M].
  Vector kernel(m);
  for (Eigen::Index d = 0; d < m; ++d) {
    Complex acc = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double p = dp * signed_mode(k, m);
      const double phase = -p * p * t / (2.0 * mass * hbar) +
                           2.0 * M_PI * static_cast<double>(k) * static_cast<double>(d) /
                               static_cast<double>(m);
      acc += Complex(std::cos(phase), std::sin(phase));
    }
    kernel[d] = acc / static_cast<double>(m);
  }
  g_.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) g_(a, b) = kernel[(a - b + m) % m];
}

Vector Propagator::apply(const Vector& psi) const {
  if (psi.size() != g_.rows()) throw DimensionError("propagator/state size mismatch");
  return g_ * psi;
}

double ClassicalAction::s(double x, double x_prev) const {
  if (!(t > 0)) throw DimensionError("classical action needs t > 0");
  const double d = x - x_prev;
  return mass * d * d / (2.0 * t);
}

double ClassicalAction::ds_dx(double x, double x_prev) const {
  if (!(t > 0)) throw DimensionError("classical action needs t > 0");
  return mass * (x - x_prev) / t;
}

Vector two_time_state(const Vector& psi0, const TransferFunctions& tf, Eigen::Index j,
                      const Propagator& g, Eigen::Index k, double* probability) {
  if (!tf.grid().same_grid(g.grid())) throw DimensionError("transfer/propagator grid mismatch");
  check_wavefunction(tf.grid(), psi0);
  if (j < 0 || j >= tf.blocks() || k < 0 || k >= tf.blocks())
    throw DimensionError("block index out of range");

  Vector branch = psi0.cwiseProduct(tf.values().row(j).transpose().cast<Complex>());
  branch = g.apply(branch);
  branch = branch.cwiseProduct(tf.values().row(k).transpose().cast<Complex>());
  const double p = branch.squaredNorm() * tf.grid().dx();
  if (probability) *probability = p;
  if (p <= kBranchFloor)
    throw ZeroProbabilityBranch("two-time branch (j,k) has zero probability");
  return branch / std::sqrt(p);
}

JointOutcomeTable two_time_joint(const Vector& psi0, const TransferFunctions& tf,
                                 const Propagator& g) {
  if (!tf.grid().same_grid(g.grid())) throw DimensionError("transfer/propagator grid mismatch");
  check_wavefunction(tf.grid(), psi0);
  const Eigen::Index n = tf.blocks(), m = tf.grid().size();
  RealMatrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector evolved = g.apply(psi0.cwiseProduct(tf.values().row(j).transpose().cast<Complex>()));
    for (Eigen::Index k = 0; k < n; ++k) {
      double s = 0;
      for (Eigen::Index x = 0; x < m; ++x)
        s += tf.values()(k, x) * tf.values()(k, x) * std::norm(evolved[x]);
      p(j, k) = s * tf.grid().dx();
    }
  }
  return JointOutcomeTable(std::move(p));
}

RealVector third_conditional(const Vector& psi0, const TransferFunctions& tf,
                             const Propagator& g_t, const Propagator& g_t_prime,
                             Eigen::Index j, Eigen::Index k) {
  if (!g_t.grid().same_grid(g_t_prime.grid()))
    throw DimensionError("the two propagators use different grids");
  Vector psi_jk = two_time_state(psi0, tf, j, g_t, k);
  Vector evolved = g_t_prime.apply(psi_jk);
  const Eigen::Index n = tf.blocks();
  RealVector q(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    double s = 0;
    for (Eigen::Index x = 0; x < tf.grid().size(); ++x)
      s += tf.values()(b, x) * tf.values()(b, x) * std::norm(evolved[x]);
    q[b] = s * tf.grid().dx();
  }
  if (std::abs(q.sum() - 1.0) > 1e-9)
    throw InvariantViolation("third-measurement conditional does not sum to 1");
  return q;
}

double classical_endpoint(double x_j, double x_k, double t, double t_prime) {
  if (!(t > 0)) throw DimensionError("classical endpoint needs t > 0");
  return x_k + (x_k - x_j) * t_prime / t;
}

MomentumDistribution momentum_distribution(const ObjectGrid& grid, const Vector& psi,
                                           double hbar) {
  if (psi.size() != grid.size()) throw DimensionError("state does not match grid");
  const Eigen::Index m = grid.size();
  const double span = grid.x_max() - grid.x_min();
  const double dp = 2.0 * M_PI * hbar / span;

  MomentumDistribution out;
  out.dp = dp;
  out.p.resize(m);
  out.prob.resize(m);
  double total = 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    Complex acc = 0;
    const double p = dp * signed_mode(k, m);
    for (Eigen::Index x = 0; x < m; ++x) {
      const double phase = -p * grid.position(x) / hbar;
      acc += psi[x] * Complex(std::cos(phase), std::sin(phase));
    }
    out.p[k] = p;
    out.prob[k] = std::norm(acc);
    total += out.prob[k];
  }
  if (total <= 0) throw InvariantViolation("empty momentum distribution");
  out.prob /= total;

  Eigen::Index peak = 0;
  out.prob.maxCoeff(&peak);
  out.peak = out.p[peak];

  // Unwrap the periodic momentum axis around the peak before taking moments.
  const double half = static_cast<double>(m) / 2.0 * dp;
  for (Eigen::Index k = 0; k < m; ++k) {
    double d = out.p[k] - out.peak;
    while (d >= half) d -= 2 * half;
    while (d < -half) d += 2 * half;
    out.p[k] = out.peak + d;
  }
  out.mean = out.p.dot(out.prob);
  double var = 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double d = out.p[k] - out.mean;
    var += d * d * out.prob[k];
  }
  out.spread = std::sqrt(var);
  return out;
}

MomentumCheckResult momentum_check(const ObjectGrid& grid, const Vector& psi_jk, double mass,
                                   double t, double x_j, double x_k, double hbar) {
  if (!(t > 0)) throw DimensionError("momentum check is degenerate at t = 0");
  MomentumDistribution dist = momentum_distribution(grid, psi_jk, hbar);
  ClassicalAction action{mass, t};
  return {dist.peak, action.ds_dx(x_k, x_j), dist.spread, dist.dp};
}

}  // namespace modal
