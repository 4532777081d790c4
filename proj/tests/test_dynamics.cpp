#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "qbattery/dynamics.hpp"
#include "qbattery/error.hpp"

using namespace qbattery;

namespace {

ModelParams params(int n, double g, double eta, double omega) {
  ModelParams p;
  p.n_tls = n;
  p.g = g;
  p.eta = eta;
  p.omega_drive = omega;
  return p;
}

}  // namespace

TEST_CASE("initial state") {
  const HilbertSpace s = build_space(10, 4);
  const QuantumState psi = initial_state(s);
  CHECK(psi.norm() == 1.0);
  const auto idx = static_cast<Eigen::Index>(s.index_of(10, -5.0));
  CHECK(psi.amplitudes(idx) == std::complex<double>(1.0, 0.0));
  CHECK((psi.amplitudes.cwiseAbs().array() > 0.0).count() == 1);
  const ModelParams p = params(10, 0.5, 0, 0);
  CHECK(expectation(build_h0(p, s), psi) == -5.0);
}

TEST_CASE("decompose") {
  SUBCASE("free spectrum") {
    const ModelParams p = params(3, 0, 0, 0);
    const HilbertSpace s = space_for(p);
    std::vector<double> expected;
    for (std::size_t i = 0; i < s.dim(); ++i) expected.push_back(s.state_of(i).photons + s.state_of(i).m);
    std::sort(expected.begin(), expected.end());
    const SpectralDecomposition d = decompose(build_h_total(p, s));
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(d.eigenvalues(static_cast<Eigen::Index>(i)) == doctest::Approx(expected[i]).epsilon(1e-14));
    }
  }
  SUBCASE("reconstruction and orthogonality") {
    const ModelParams p = params(4, 0.8, -1.5, 0.6);
    const OperatorMatrix h = build_h_total(p, space_for(p));
    const SpectralDecomposition d = decompose(h);
    const double scale = max_abs(h);
    CHECK((d.reconstruct() - h.elements()).cwiseAbs().maxCoeff() <= 1e-9 * scale);
    const Eigen::MatrixXd gram = d.eigenvectors.transpose() * d.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-10);
    for (Eigen::Index k = 1; k < d.size(); ++k) CHECK(d.eigenvalues(k) >= d.eigenvalues(k - 1));
  }
  SUBCASE("driven Rabi model against a second eigensolver") {
    const ModelParams p = params(1, 0.7, 0.0, 0.4);
    const OperatorMatrix h = build_h_total(p, space_for(p));
    const Eigen::VectorXd ours = decompose(h).eigenvalues;
    const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.elements()).eigenvalues();
    CHECK((ours - ref).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("lowest eigenpairs agree with the full solve") {
    const ModelParams p = params(3, 0.4, 1.0, 0.2);
    const OperatorMatrix h = build_h_total(p, space_for(p));
    const SpectralDecomposition full = decompose(h);
    const SpectralDecomposition low = lowest_eigenpairs(h.elements(), 2);
    CHECK(std::abs(low.eigenvalues(0) - full.eigenvalues(0)) <= 1e-10);
    CHECK(std::abs(low.eigenvalues(1) - full.eigenvalues(1)) <= 1e-10);
    CHECK(std::abs(std::abs(low.eigenvectors.col(0).dot(full.eigenvectors.col(0))) - 1.0) <= 1e-9);
  }
  SUBCASE("non-finite input is an explicit error") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
    m(1, 1) = NAN;
    CHECK_THROWS_AS(decompose(m), NumericalError);
  }
}

TEST_CASE("evolve") {
  const ModelParams p = params(2, 0.5, 0.0, 0.0);
  const HilbertSpace s = space_for(p);
  const OperatorMatrix h = build_h_total(p, s);
  const SpectralDecomposition d = decompose(h);
  const QuantumState psi0 = initial_state(s);

  const QuantumState same = evolve(d, psi0, 0.0);
  CHECK((same.amplitudes - psi0.amplitudes).cwiseAbs().maxCoeff() <= 1e-14);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int k = 0; k < 10; ++k) CHECK(std::abs(evolve(d, psi0, u(rng)).norm() - 1.0) <= 1e-10);

  const Eigen::VectorXcd oracle = testing::propagator_taylor(h.elements(), 1.0) * psi0.amplitudes;
  CHECK((evolve(d, psi0, 1.0).amplitudes - oracle).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK_THROWS_AS(evolve(d, psi0, -1.0), InvalidArgument);
}

TEST_CASE("stored energy, power and fluctuation primitives") {
  const ModelParams p = params(4, 0.5, 0.0, 0.0);
  const HilbertSpace s = space_for(p);
  const OperatorMatrix h0 = build_h0(p, s);
  const QuantumState psi0 = initial_state(s);
  CHECK(stored_energy(psi0, psi0, h0) == 0.0);
  CHECK(energy_fluctuation(psi0, psi0, h0) == 0.0);

  QuantumState full{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.dim()))};
  full.amplitudes(static_cast<Eigen::Index>(s.index_of(0, s.j()))) = 1.0;
  CHECK(stored_energy(full, psi0, h0) == doctest::Approx(4.0));
  CHECK(energy_fluctuation(full, psi0, h0) == 0.0);

  CHECK(charging_power(5.0, 2.0) == 2.5);
  CHECK(charging_power(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(charging_power(1.0, -1.0), InvalidArgument);

  // equal superposition of m = -2 and m = +2: sd of J_z is 2
  QuantumState cat{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.dim()))};
  cat.amplitudes(static_cast<Eigen::Index>(s.index_of(1, -2.0))) = std::sqrt(0.5);
  cat.amplitudes(static_cast<Eigen::Index>(s.index_of(1, 2.0))) = std::sqrt(0.5);
  CHECK(energy_fluctuation(cat, psi0, h0) == doctest::Approx(2.0));
}

TEST_CASE("reachable sector splits by parity without drive") {
  const ModelParams undriven = params(3, 0.5, 1.0, 0.0);
  const HilbertSpace s = space_for(undriven);
  const Eigen::Index seed = static_cast<Eigen::Index>(s.index_of(3, -1.5));
  const auto sector = reachable_indices(build_h_total(undriven, s).elements(), seed);
  CHECK(sector.size() * 2 == s.dim());
  for (Eigen::Index i : sector) {
    const BasisLabel b = s.state_of(static_cast<std::size_t>(i));
    CHECK(std::lround(b.photons + b.m + s.j()) % 2 == (3 + 0) % 2);
  }
  const ModelParams driven = params(3, 0.5, 1.0, 0.2);
  CHECK(reachable_indices(build_h_total(driven, s).elements(), seed).size() == s.dim());
}

TEST_CASE("ChargingDynamics matches full-space evolution") {
  for (const ModelParams& p : {params(3, 0.5, 1.0, 0.0), params(3, 0.3, -2.0, 0.7)}) {
    const HilbertSpace s = space_for(p);
    const OperatorMatrix h0 = build_h0(p, s);
    const SpectralDecomposition d = decompose(build_h_total(p, s));
    const QuantumState psi0 = initial_state(s);
    const ChargingDynamics dyn(p);
    for (double t : {0.0, 0.37, 2.5, 11.0}) {
      const QuantumState psi_t = evolve(d, psi0, t);
      const Observables o = dyn.at(t);
      CHECK(o.energy == doctest::Approx(stored_energy(psi_t, psi0, h0)).epsilon(1e-9));
      INFO("t = " << t);
      CHECK(std::abs(o.fluctuation - energy_fluctuation(psi_t, psi0, h0)) <= 1e-9);
      CHECK(std::abs(o.sz_ratio - expectation(op_jz(s), psi_t) / s.j()) <= 1e-10);
      CHECK((dyn.state(t).amplitudes - psi_t.amplitudes).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("trace invariants") {
  const ModelParams p = params(2, 0.5, 0.4, 0.3);
  ChargingProtocol proto;
  proto.search_horizon = 8.0;
  proto.coarse_points = 200;
  const ChargingDynamics dyn(p);
  const ChargingTrace tr = trace(dyn, proto);
  REQUIRE(tr.times.size() == 201);
  CHECK(tr.energy.size() == 201);
  CHECK(tr.power.size() == 201);
  CHECK(tr.fluctuation.size() == 201);
  CHECK(tr.sz.size() == 201);
  CHECK(tr.energy[0] == 0.0);
  CHECK(tr.power[0] == 0.0);
  CHECK(tr.fluctuation[0] == 0.0);
  CHECK(tr.sz[0] == -1.0);
  CHECK(tr.times.back() == 8.0);

  const HilbertSpace s = space_for(p);
  const OperatorMatrix h = build_h_total(p, s);
  const double e_total0 = expectation(h, initial_state(s));
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    CHECK(tr.energy[k] >= -1e-9);
    CHECK(tr.energy[k] <= 2.0 + 1e-9);
    CHECK(tr.fluctuation[k] >= 0.0);
    const QuantumState psi = dyn.state(tr.times[k]);
    CHECK(std::abs(psi.norm() - 1.0) <= 1e-10);
    CHECK(std::abs(expectation(h, psi) - e_total0) <= 1e-9);
  }
}

TEST_CASE("golden-section refinement never loses to the coarse grid") {
  const ModelParams p = params(4, 0.5, 0.0, 0.2);
  ChargingProtocol proto;
  proto.search_horizon = 6.0;
  proto.coarse_points = 100;
  const ChargingDynamics dyn(p);
  const ChargingTrace tr = trace(dyn, proto);
  const ExtremumReport rep = find_extrema(dyn, proto);
  CHECK(rep.e_max >= *std::max_element(tr.energy.begin(), tr.energy.end()));
  CHECK(rep.p_max >= *std::max_element(tr.power.begin(), tr.power.end()));
  CHECK(rep.p_max * rep.t_p == doctest::Approx(dyn.at(rep.t_p).energy).epsilon(1e-12));
  CHECK(rep.sigma_bar == doctest::Approx(dyn.at(rep.t_e).fluctuation));
  CHECK(rep.t_e > 0.0);
  CHECK(rep.t_e <= 6.0);
}

TEST_CASE("horizon warning when the maximum sits on the boundary") {
  ChargingProtocol proto;
  proto.search_horizon = 0.05;  // energy still rising
  proto.coarse_points = 100;
  const ExtremumReport rep = find_extrema(params(2, 0.5, 0.0, 0.0), proto);
  CHECK(rep.horizon_warning);
  CHECK(!rep.warnings.empty());
}

TEST_CASE("off-resonance runs are stamped unvalidated") {
  ModelParams p = params(2, 0.5, 0.0, 0.0);
  p.omega_c = 1.2;
  ChargingProtocol proto;
  proto.search_horizon = 5.0;
  proto.coarse_points = 100;
  const ChargingTrace tr = trace(p, proto);
  REQUIRE(tr.warnings.size() == 1);
  CHECK(tr.warnings[0].find("unvalidated") != std::string::npos);
}

// Benchmark values at N = 10 (stored energy and its fluctuation in units of w_a).
TEST_CASE("benchmark charging extrema at N = 10") {
  const ChargingProtocol proto;
  SUBCASE("g = 0.1, no interaction") {
    const ExtremumReport rep = find_extrema(params(10, 0.1, 0.0, 0.0), proto);
    CHECK(std::abs(rep.e_max - 7.931) <= 0.01);
    CHECK(std::abs(rep.sigma_bar - 1.391) <= 0.01);
    CHECK_FALSE(rep.horizon_warning);
  }
  SUBCASE("g = 0.1, attractive interaction") {
    const ExtremumReport rep = find_extrema(params(10, 0.1, -2.0, 0.0), proto);
    CHECK(std::abs(rep.e_max - 1.473) <= 0.01);
    CHECK(std::abs(rep.sigma_bar - 2.013) <= 0.01);
  }
  SUBCASE("g = 0.5 power at t_P is consistent with the fitted scaling law") {
    const ExtremumReport rep = find_extrema(params(10, 0.5, 0.0, 0.0), proto);
    // alpha = 1.50, tabulated prefactor 0.93 under the base-10 intercept convention
    const double beta = std::exp(std::log(0.93) * std::log(10.0));
    CHECK(rep.p_max / 0.5 == doctest::Approx(beta * std::pow(10.0, 1.5)).epsilon(0.02));
  }
  SUBCASE("g = 2.0 trace peak") {
    const ChargingTrace tr = trace(params(10, 2.0, 0.0, 0.0), proto);
    CHECK(std::abs(*std::max_element(tr.energy.begin(), tr.energy.end()) - 7.000) <= 0.01);
    for (double e : tr.energy) CHECK(e <= 10.0 + 1e-9);
  }
}
