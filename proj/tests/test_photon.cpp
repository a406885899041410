#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "photon.hpp"
#include "rng.hpp"

using namespace modal;

namespace {

ObjectDensity random_mixed_density(Rng& rng, const ObjectGrid& grid, int rank) {
  Matrix phys = Matrix::Zero(grid.size(), grid.size());
  double total = 0;
  for (int k = 0; k < rank; ++k) {
    const double w = rng.uniform() + 0.2;
    Vector v = random_unit_vector(rng, grid.size());
    phys += w * (v * v.adjoint()).eval();
    total += w;
  }
  return ObjectDensity(grid, phys / (total * grid.dx()));
}

ObjectDensity delta_density(const ObjectGrid& grid, Eigen::Index m) {
  Matrix rho = Matrix::Zero(grid.size(), grid.size());
  rho(m, m) = 1.0 / grid.dx();
  return ObjectDensity(grid, std::move(rho));
}

ObjectDensity uniform_density(const ObjectGrid& grid) {
  Matrix rho = Matrix::Identity(grid.size(), grid.size());
  return ObjectDensity(grid, rho / (static_cast<double>(grid.size()) * grid.dx()));
}

// Same tapered-Gaussian block amplitudes evaluated by hand at one point.
RealVector reference_block_amplitudes(double u, const RealVector& centers, double sigma) {
  RealVector g(centers.size());
  for (Eigen::Index j = 0; j < centers.size(); ++j) {
    const double a = std::abs(u - centers[j]);
    double v = 0;
    if (a < 2 * sigma) {
      double taper = 1.0;
      if (a > sigma) {
        const double s = std::cos(0.5 * M_PI * (a - sigma) / sigma);
        taper = s * s;
      }
      v = std::exp(-a * a / (4 * sigma * sigma)) * taper;
    }
    g[j] = v;
  }
  return g / g.norm();
}

}  // namespace

TEST_CASE("grid is cell centered with uniform spacing") {
  ObjectGrid g(4, 0.0, 1.0);
  CHECK(g.dx() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.position(0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(g.position(3) == doctest::Approx(0.875).epsilon(1e-15));
  CHECK_THROWS_AS(ObjectGrid(1, 0.0, 1.0), DimensionError);
  CHECK_THROWS_AS(ObjectGrid(4, 1.0, 1.0), DimensionError);
  CHECK(g.same_grid(ObjectGrid(4, 0.0, 1.0)));
  CHECK_FALSE(g.same_grid(ObjectGrid(4, 0.0, 2.0)));
}

TEST_CASE("narrow point-spread limit maps grid points to their own blocks") {
  ObjectGrid g(6, -1.0, 2.0);
  TransferFunctions tf(g, 6, 1e-3 * 0.5);
  for (Eigen::Index j = 0; j < 6; ++j)
    for (Eigen::Index m = 0; m < 6; ++m)
      CHECK(tf.values()(j, m) == doctest::Approx(j == m ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("columns are normalized whenever every point is covered") {
  ObjectGrid g(37, 0.0, 1.0);
  for (double sigma : {0.06, 0.08, 0.3, 5.0}) {
    TransferFunctions tf(g, 5, sigma);
    for (Eigen::Index m = 0; m < g.size(); ++m)
      CHECK(tf.values().col(m).squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
  }
  // A psf much narrower than the pitch leaves blind gaps between blocks:
  // a photon from there reaches no receptor, which is a geometry error.
  CHECK_THROWS_AS(TransferFunctions(g, 5, 0.01), DimensionError);
}

TEST_CASE("adjacent-block overlap matches fine-grid quadrature") {
  const Eigen::Index n = 4;
  ObjectGrid coarse(400, 0.0, 1.0);
  TransferFunctions tf(coarse, n, 0.25);  // sigma = block pitch
  double overlap = 0;
  for (Eigen::Index m = 0; m < coarse.size(); ++m)
    overlap += tf.values()(1, m) * tf.values()(2, m);
  overlap *= coarse.dx();

  // Midpoint quadrature of the same normalized profiles at 100x resolution.
  const Eigen::Index fine_n = 40000;
  const double h = 1.0 / static_cast<double>(fine_n);
  double ref = 0;
  for (Eigen::Index i = 0; i < fine_n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) * h;
    RealVector c = reference_block_amplitudes(u, tf.block_centers(), 0.25);
    ref += c[1] * c[2];
  }
  ref *= h;
  CHECK(overlap == doctest::Approx(ref).epsilon(1e-4));
  CHECK(overlap > 0.1);  // sanity: wide psf really does straddle blocks
}

TEST_CASE("image map places blocks over the image of the grid") {
  ObjectGrid g(5, 0.0, 1.0);
  TransferFunctions tf(g, 5, 1e-4, {2.0, 1.0});
  // Image spans [1, 3]; block centers follow it.
  CHECK(tf.block_centers()[0] == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(tf.block_centers()[4] == doctest::Approx(2.8).epsilon(1e-12));
  for (Eigen::Index m = 0; m < 5; ++m)
    CHECK(tf.values()(m, m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("photon that cannot reach any block is an error") {
  ObjectGrid g(8, 0.0, 1.0);
  CHECK_THROWS_AS(TransferFunctions(g, 4, 0.01, {}, 10.0, 20.0), DimensionError);
  CHECK_THROWS_AS(TransferFunctions(g, 1, 0.1), DimensionError);
  CHECK_THROWS_AS(TransferFunctions(g, 4, -0.1), DimensionError);
  CHECK_THROWS_AS(TransferFunctions(g, 4, 0.0), DimensionError);
}

TEST_CASE("display probabilities for a point-like object read off one column") {
  ObjectGrid g(8, 0.0, 1.0);
  TransferFunctions tf(g, 3, 0.2);
  ObjectDensity rho = delta_density(g, 5);
  RealVector p = display_probabilities(rho, tf);
  for (Eigen::Index j = 0; j < 3; ++j)
    CHECK(p[j] == doctest::Approx(tf.values()(j, 5) * tf.values()(j, 5)).epsilon(1e-12));
}

TEST_CASE("uniform object with one block per point gives uniform display odds") {
  ObjectGrid g(8, 0.0, 1.0);
  TransferFunctions tf(g, 8, 1e-4);
  RealVector p = display_probabilities(uniform_density(g), tf);
  for (Eigen::Index j = 0; j < 8; ++j)
    CHECK(p[j] == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("display probabilities ignore object coherences") {
  ObjectGrid g(6, 0.0, 1.0);
  TransferFunctions tf(g, 3, 0.15);
  Rng rng(3);
  ObjectDensity rho = random_mixed_density(rng, g, 2);
  Matrix stripped = Matrix::Zero(6, 6);
  stripped.diagonal() = rho.mat().diagonal();
  RealVector a = display_probabilities(rho, tf);
  RealVector b = display_probabilities(ObjectDensity(g, stripped), tf);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("display probabilities match the full entangled-state reduction") {
  ObjectGrid g(8, -0.5, 0.5);
  TransferFunctions tf(g, 3, 0.5 / 3.0);
  Rng rng(11);
  ObjectDensity rho = random_mixed_density(rng, g, 3);
  RealVector fast = display_probabilities(rho, tf);
  RealVector slow = oracle_display_probabilities(rho, tf);
  CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(fast.sum() == doctest::Approx(1.0).epsilon(1e-10));

  ObjectGrid other(7, -0.5, 0.5);
  CHECK_THROWS_AS(display_probabilities(uniform_density(other), tf), DimensionError);
}

TEST_CASE("orthogonal recoil kernel reproduces the recoil-free probabilities") {
  ObjectGrid g(10, 0.0, 2.0);
  TransferFunctions tf(g, 4, 0.3);
  Rng rng(17);
  ObjectDensity rho = random_mixed_density(rng, g, 3);
  double norm = 0;
  RealVector a = display_probabilities_recoil(rho, tf, RecoilKernel::orthogonal(g), &norm);
  RealVector b = display_probabilities(rho, tf);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));

  // w = 0 Gaussian is the same orthogonal limit.
  RealVector c = display_probabilities_recoil(rho, tf, RecoilKernel::gaussian(g, 0.0));
  CHECK((a - c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("identical recoil states make blocks read coherent amplitudes") {
  ObjectGrid g(12, 0.0, 1.0);
  TransferFunctions tf(g, 3, 0.2);
  Rng rng(23);
  Vector psi = random_unit_vector(rng, 12) / std::sqrt(g.dx());
  ObjectDensity rho = ObjectDensity::from_wavefunction(g, psi);

  double norm = 0;
  RealVector p = display_probabilities_recoil(rho, tf, RecoilKernel::flat(g), &norm);
  RealVector ref(3);
  for (Eigen::Index j = 0; j < 3; ++j) {
    Complex acc = 0;
    for (Eigen::Index m = 0; m < 12; ++m) acc += psi[m] * tf.values()(j, m);
    ref[j] = std::norm(acc) * g.dx();
  }
  CHECK(norm == doctest::Approx(ref.sum()).epsilon(1e-10));
  ref /= ref.sum();
  CHECK((p - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gaussian recoil matches the embedded-state oracle") {
  ObjectGrid g(8, 0.0, 1.0);
  TransferFunctions tf(g, 3, 0.5 / 3.0);
  Rng rng(31);
  ObjectDensity rho = random_mixed_density(rng, g, 3);
  for (double w : {0.05, 0.2, 1.5}) {
    RecoilKernel kernel = RecoilKernel::gaussian(g, w);
    kernel.validate_psd();
    RealVector fast = display_probabilities_recoil(rho, tf, kernel);
    RealVector slow = oracle_display_probabilities_recoil(rho, tf, kernel);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(fast.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("an indefinite kernel is caught by a negative branch weight") {
  ObjectGrid g(2, 0.0, 1.0);
  TransferFunctions tf(g, 2, 0.5);
  Vector psi(2);
  psi << 1.0, -1.0;
  psi /= std::sqrt(psi.squaredNorm() * g.dx());
  ObjectDensity rho = ObjectDensity::from_wavefunction(g, psi);
  Matrix k(2, 2);
  k << 1, 2, 2, 1;  // Hermitian, unit diagonal, eigenvalues {3, -1}
  RecoilKernel bad(g, k, 0.0, 0.0);
  CHECK_THROWS_AS(display_probabilities_recoil(rho, tf, bad), InvariantViolation);
}

TEST_CASE("photon kernel: unit diagonal, narrow limit, positivity") {
  ObjectGrid g(9, 0.0, 1.0);
  {
    TransferFunctions tf(g, 9, 1e-4);
    Matrix k = photon_kernel(tf);
    CHECK((k - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    TransferFunctions tf(g, 3, 0.21);
    Matrix k = photon_kernel(tf);
    for (Eigen::Index m = 0; m < 9; ++m) CHECK(k(m, m).real() == 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("object state after the light: dephasing structure") {
  ObjectGrid g(8, 0.0, 1.0);
  Rng rng(41);
  ObjectDensity rho = random_mixed_density(rng, g, 3);

  // One block per grid point and a narrow psf: full dephasing.
  TransferFunctions narrow(g, 8, 1e-4);
  ObjectDensity dephased = object_state_after_light(rho, narrow);
  Matrix diag_only = Matrix::Zero(8, 8);
  diag_only.diagonal() = rho.mat().diagonal();
  CHECK((dephased.mat() - diag_only).cwiseAbs().maxCoeff() * g.dx() < 1e-10);

  // A diagonal state is a fixed point.
  ObjectDensity diag_rho(g, diag_only);
  TransferFunctions wide(g, 3, 0.25);
  CHECK((object_state_after_light(diag_rho, wide).mat() - diag_only).cwiseAbs().maxCoeff() <
        1e-14);

  // General case against the full-tensor reduction; diagonal untouched.
  ObjectDensity after = object_state_after_light(rho, wide);
  Matrix slow = oracle_object_after_light(rho, wide);
  CHECK((after.mat() - slow).cwiseAbs().maxCoeff() * g.dx() < 1e-10);
  CHECK((after.mat().diagonal() - rho.mat().diagonal()).cwiseAbs().maxCoeff() == 0.0);
  after.validate_psd();

  // Entrywise identity with the kernel product, by construction.
  Matrix prod = rho.mat().cwiseProduct(photon_kernel(wide));
  CHECK((after.mat() - prod).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("object state relative to a display outcome") {
  ObjectGrid g(8, 0.0, 1.0);

  // Point-like object: conditioning cannot move it.
  TransferFunctions wide(g, 3, 0.4);
  ObjectDensity delta = delta_density(g, 4);
  ObjectDensity still = relational_object_state(delta, wide, 1);
  CHECK((still.mat() - delta.mat()).cwiseAbs().maxCoeff() * g.dx() < 1e-12);

  // Uniform object, one block per point: conditioning selects that point.
  TransferFunctions narrow(g, 8, 1e-4);
  ObjectDensity uni = uniform_density(g);
  ObjectDensity picked = relational_object_state(uni, narrow, 5);
  CHECK((picked.mat() - delta_density(g, 5).mat()).cwiseAbs().maxCoeff() * g.dx() < 1e-10);

  // A block that cannot fire cannot be conditioned on.
  CHECK_THROWS_AS(relational_object_state(delta_density(g, 0), narrow, 7),
                  ZeroProbabilityBranch);

  // General case against conditioning the full entangled state.
  Rng rng(43);
  ObjectDensity rho = random_mixed_density(rng, g, 3);
  RealVector p = display_probabilities(rho, wide);
  for (Eigen::Index j = 0; j < 3; ++j) {
    if (p[j] < 1e-6) continue;
    ObjectDensity fast = relational_object_state(rho, wide, j);
    Matrix slow = oracle_relational_object_state(rho, wide, j);
    CHECK((fast.mat() - slow).cwiseAbs().maxCoeff() * g.dx() < 1e-10);
    CHECK(fast.trace() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("conditioning a uniform object localizes it to the block scale") {
  ObjectGrid g(256, 0.0, 1.0);
  const double sigma = 0.5 / 16.0;  // half the block pitch
  TransferFunctions tf(g, 16, sigma);
  ObjectDensity uni = uniform_density(g);
  const double v0 = position_std(uni);
  ObjectDensity cond = relational_object_state(uni, tf, 8);
  const double v1 = position_std(cond);
  CHECK(v1 * v1 <= 4 * sigma * sigma);
  CHECK(v1 < v0 / 4);
  CHECK(position_mean(cond) == doctest::Approx(tf.block_centers()[8]).epsilon(1e-6));
}

TEST_CASE("display density after a generic measurement") {
  Vector oe1(2), oe2(2);
  oe1 << 1, 0;
  oe2 << M_SQRT1_2, M_SQRT1_2;  // deliberately not orthogonal to oe1

  SUBCASE("single branch is a pure display state") {
    std::vector<MeasurementBranch> b = {{{1, 0}, 1.0, oe1}};
    DensityOperator d = generic_display_density(b);
    CHECK(d.mat()(2, 2).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.mat().cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("equal weights merge into a degenerate candidate") {
    std::vector<MeasurementBranch> b = {{{1, 0}, M_SQRT1_2, oe1}, {{0, 1}, M_SQRT1_2, oe2}};
    DensityOperator d = generic_display_density(b);
    auto spec = spectral_resolution(d);
    REQUIRE(spec.entries.size() == 2);  // weight 1/2 twice merged, plus kernel
    CHECK(spec.entries[0].multiplicity == 2);
    CHECK(spec.entries[0].eigenvalue == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("weights are the squared amplitudes even for overlapping branches") {
    Rng rng(53);
    Vector amps(3);
    for (int i = 0; i < 3; ++i) amps[i] = rng.complex_normal();
    amps /= amps.norm();
    std::vector<MeasurementBranch> b = {{{0, 0}, amps[0], oe1},
                                        {{0, 1}, amps[1], oe2},
                                        {{1, 1}, amps[2], oe1}};
    DensityOperator d = generic_display_density(b);
    DensityOperator slow = oracle_generic_display_density(b);
    CHECK((d.mat() - slow.mat()).cwiseAbs().maxCoeff() < 1e-12);

    RealVector expect(3);
    for (int i = 0; i < 3; ++i) expect[i] = std::norm(amps[i]);
    std::sort(expect.data(), expect.data() + 3, std::greater<double>());
    auto spec = spectral_resolution(d);
    for (int i = 0; i < 3; ++i)
      CHECK(spec.entries[static_cast<size_t>(i)].eigenvalue ==
            doctest::Approx(expect[i]).epsilon(1e-12));
  }

  SUBCASE("input validation") {
    std::vector<MeasurementBranch> dup = {{{1, 0}, M_SQRT1_2, oe1}, {{1, 0}, M_SQRT1_2, oe1}};
    CHECK_THROWS_AS(generic_display_density(dup), DimensionError);
    std::vector<MeasurementBranch> bad_bits = {{{2, 0}, 1.0, oe1}};
    CHECK_THROWS_AS(generic_display_density(bad_bits), DimensionError);
    std::vector<MeasurementBranch> unnormalized = {{{1, 0}, 0.5, oe1}};
    CHECK_THROWS_AS(generic_display_density(unnormalized), InvariantViolation);
  }
}

TEST_CASE("oracle battery passes at small dimensions") {
  for (const auto& check : run_oracle_battery(7)) {
    INFO(check.name, " deviation ", check.deviation, " tol ", check.tolerance);
    CHECK(check.pass());
  }
}
