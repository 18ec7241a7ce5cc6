#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "netloc/potential.hpp"
#include "netloc/rng.hpp"
#include "netloc/spectral.hpp"

using namespace netloc;

namespace {

RadioParams radio_rmax(double rmax, int antennas = 3) {
  RadioParams r;
  r.antennas = antennas;
  r.rmax_override_m = rmax;
  return r;
}

// four nearest neighbors with isotropic blocks: aperture tuned so the
// ranging and bearing intensities coincide at one lattice step
RadioParams isotropic_four_neighbor(double spacing) {
  RadioParams r = radio_rmax(1.2 * spacing);
  r.aperture_factor = std::pow(spacing * r.bandwidth_hz / r.carrier_hz, 2);
  return r;
}

}  // namespace

TEST_CASE("stencil: normalization, symmetry and the four-neighbor special case") {
  const RadioParams radio = isotropic_four_neighbor(10.0);
  const NeighborStencil st = lattice_stencil(radio, 10.0);
  REQUIRE(st.offsets.size() == 4);
  Mat2 sum = Mat2::Zero();
  for (const auto& b : st.blocks) sum += b;
  CHECK((sum - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  for (std::size_t k = 0; k < st.offsets.size(); ++k) {
    // mirror offset carries the same block
    for (std::size_t l = 0; l < st.offsets.size(); ++l)
      if (st.offsets[l] == -st.offsets[k]) CHECK((st.blocks[k] - st.blocks[l]).norm() < 1e-15);
    CHECK((st.blocks[k] - 0.25 * Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(lattice_stencil(radio_rmax(5.0), 10.0), std::invalid_argument);
}

TEST_CASE("pseudo characteristic: unit value at zero and hand-computed four-neighbor form") {
  const RadioParams radio = isotropic_four_neighbor(10.0);
  const NeighborStencil st = lattice_stencil(radio, 10.0);

  const SpectralSample zero = pseudo_characteristic(st, Vec2(0, 0));
  CHECK((zero.phi - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  Rng rng(3);
  for (int rep = 0; rep < 32; ++rep) {
    const Vec2 theta(rng.uniform(-M_PI, M_PI), rng.uniform(-M_PI, M_PI));
    if (theta.norm() > M_PI) continue;
    const SpectralSample s = pseudo_characteristic(st, theta);
    const double expect = 0.5 * (std::cos(theta.x()) + std::cos(theta.y()));
    CHECK(s.phi.imag().cwiseAbs().maxCoeff() < 1e-14);
    CHECK((s.phi.real() - expect * Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    // even in theta
    const SpectralSample m = pseudo_characteristic(st, Vec2(-theta));
    CHECK((s.phi - m.phi).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("pseudo characteristic: hermitian, real, and I - phi is psd on the default stencil") {
  const NeighborStencil st = lattice_stencil(RadioParams{}, 20.0);
  Mat2 sum = Mat2::Zero();
  for (const auto& b : st.blocks) sum += b;
  CHECK((sum - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12);

  Rng rng(11);
  for (int rep = 0; rep < 64; ++rep) {
    const double r = rng.uniform(0.0, M_PI), a = rng.uniform(0, 2 * M_PI);
    const Vec2 theta = r * unit_vec(a);
    const SpectralSample s = pseudo_characteristic(st, theta);
    CHECK((s.phi - s.phi.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.phi.imag().cwiseAbs().maxCoeff() < 1e-13);
    const Mat2 iphi = Mat2::Identity() - s.phi.real();
    Eigen::SelfAdjointEigenSolver<Mat2> es(iphi);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    // second-moment matrix positive definite and norm-independent
    Eigen::SelfAdjointEigenSolver<Mat2> s2(s.sigma2);
    CHECK(s2.eigenvalues().minCoeff() > 0);
    const SpectralSample scaled = pseudo_characteristic(st, Vec2(0.5 * theta));
    CHECK((scaled.sigma2 - s.sigma2).norm() < 1e-12 * s.sigma2.norm());
  }
  // directional limit at zero uses the x direction
  const SpectralSample at_zero = pseudo_characteristic(st, Vec2(0, 0));
  const SpectralSample small_x = pseudo_characteristic(st, Vec2(1e-9, 0));
  CHECK((at_zero.sigma2 - small_x.sigma2).norm() < 1e-9 * at_zero.sigma2.norm());
}

TEST_CASE("infinite potential: zero displacement, mirror symmetry") {
  const NeighborStencil st = lattice_stencil(RadioParams{}, 20.0);
  CHECK(potential_infinite(st, {0, 0}).norm() == 0.0);
  const Mat2 p = potential_infinite(st, {3, 1});
  const Mat2 m = potential_infinite(st, {-3, -1});
  CHECK((p - m).cwiseAbs().maxCoeff() < 1e-12 * p.norm());
}

TEST_CASE("infinite potential: matches a large finite lattice in the interior") {
  // moderate disk so the unit test stays quick; the full-size comparison
  // lives in the acceptance suite
  RadioParams radio = radio_rmax(46.0);
  auto t = build_lattice_disk(20.0, 460.0);
  t = connect_by_link_budget(t, radio);
  const auto g = build_information_graph(t, radio);
  const auto aux = transition_operator(g, TransitionMode::Auxiliary);
  const auto kernel = potential_kernel_finite(aux);
  auto find_node = [&](int x, int y) {
    for (int v = 0; v < g.n_nodes(); ++v)
      if ((g.positions[v] - Vec2(20.0 * x, 20.0 * y)).norm() < 1e-9) return v;
    return -1;
  };
  const NeighborStencil st = lattice_stencil(radio, 20.0);
  for (const Eigen::Vector2i d : {Eigen::Vector2i(2, 0), Eigen::Vector2i(3, 2)}) {
    const Mat2 inf = potential_infinite(st, d);
    // symmetric pair about the centre
    const int a = find_node(-d.x() / 2 - d.x() % 2, -d.y() / 2 - d.y() % 2);
    const int b = find_node(d.x() / 2, d.y() / 2);
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    const Mat2 fin = kernel.block(a, b);
    CHECK((inf - fin).norm() < 0.10 * fin.norm());
  }
}

TEST_CASE("asymptote fit: exact synthetic curves and error paths") {
  std::vector<double> d, y;
  for (int k = 0; k < 12; ++k) {
    const double x = 2.0 + k;
    d.push_back(x);
    y.push_back(2.0 * std::log(x) + 1.0);
  }
  const FitResult f = asymptote_fit(d, y, FitModel::Log);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> yq;
  for (double x : d) yq.push_back(0.5 * x * x - 3.0);
  const FitResult q = asymptote_fit(d, yq, FitModel::Quadratic);
  CHECK(q.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q.r2 == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> ys;
  for (double x : d) ys.push_back(4.0 * std::sqrt(x) + 2.0);
  CHECK(asymptote_fit(d, ys, FitModel::Sqrt).slope == doctest::Approx(4.0).epsilon(1e-12));

  CHECK_THROWS_AS(asymptote_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3},
                                FitModel::Log),
                  std::invalid_argument);
  std::vector<double> bad = d;
  bad[5] = bad[4];
  CHECK_THROWS_AS(asymptote_fit(bad, y, FitModel::Log), std::invalid_argument);
}

TEST_CASE("infinite potential: eigenvalues grow with distance") {
  const NeighborStencil st = lattice_stencil(radio_rmax(46.0), 20.0);
  double prev = 0;
  for (int k = 2; k <= 10; k += 2) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(potential_infinite(st, {k, 0}));
    CHECK(es.eigenvalues().minCoeff() > prev);
    prev = es.eigenvalues().minCoeff();
  }
}
