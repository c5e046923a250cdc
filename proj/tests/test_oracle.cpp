#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ljcm/dynamics.hpp"
#include "ljcm/model.hpp"
#include "ljcm/oracle.hpp"

using namespace ljcm;
using oracle::flat_index;

namespace {

// Field-only lowering operator R = a f(n): <m-1|R|m> = sqrt(m) f(m).
Eigen::MatrixXcd build_R(const NonlinearityFn& f, int n_max_photons) {
    Eigen::MatrixXcd R =
        Eigen::MatrixXcd::Zero(n_max_photons + 1, n_max_photons + 1);
    for (int m = 1; m <= n_max_photons; ++m)
        R(m - 1, m) = std::sqrt(static_cast<double>(m)) * f(m);
    return R;
}

// Excitation operator a^dag a + sigma_11 in the flat joint basis.
Eigen::MatrixXcd build_excitation(int n_max_photons) {
    const int dim = 3 * (n_max_photons + 1);
    Eigen::MatrixXcd N = Eigen::MatrixXcd::Zero(dim, dim);
    for (int m = 0; m <= n_max_photons; ++m) {
        N(flat_index(1, m), flat_index(1, m)) = m + 1.0;
        N(flat_index(2, m), flat_index(2, m)) = m;
        N(flat_index(3, m), flat_index(3, m)) = m;
    }
    return N;
}

}  // namespace

TEST_CASE("flat index layout") {
    CHECK(flat_index(1, 0) == 0);
    CHECK(flat_index(2, 0) == 1);
    CHECK(flat_index(3, 0) == 2);
    CHECK(flat_index(1, 7) == 21);
    CHECK(flat_index(3, 7) == 23);
    // bijective over the first photon levels
    std::vector<bool> seen(30, false);
    for (int m = 0; m < 10; ++m)
        for (int lvl = 1; lvl <= 3; ++lvl) {
            const int i = flat_index(lvl, m);
            CHECK(!seen[static_cast<size_t>(i)]);
            seen[static_cast<size_t>(i)] = true;
        }
    CHECK_THROWS_AS(flat_index(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(flat_index(4, 1), std::invalid_argument);
    CHECK_THROWS_AS(flat_index(1, -1), std::invalid_argument);
}

TEST_CASE("Hamiltonian structure") {
    const ModelParams p = ModelParams::scaled(1.0, 0.4, 7.0, 15.0);
    const NonlinearityFn f = NonlinearityFn::inverse_sqrt();
    const int n_ph = 12;
    const Eigen::MatrixXcd H = oracle::build_hamiltonian(p, f, n_ph);

    REQUIRE(H.rows() == 3 * (n_ph + 1));
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() == 0.0);

    // diagonal: omega_level + Omega m + chi m(m-1)
    for (int m = 0; m <= n_ph; ++m) {
        const double field = p.Omega * m + p.chi * m * (m - 1.0);
        CHECK(std::abs(H(flat_index(1, m), flat_index(1, m)) -
                       cplx{p.omega1 + field, 0.0}) < 1e-14);
        CHECK(std::abs(H(flat_index(2, m), flat_index(2, m)) -
                       cplx{p.omega2 + field, 0.0}) < 1e-14);
        CHECK(std::abs(H(flat_index(3, m), flat_index(3, m)) -
                       cplx{p.omega3 + field, 0.0}) < 1e-14);
    }
    // couplings: <1, m-1| H |2, m> = lambda2 sqrt(m) f(m), likewise level 3
    for (int m = 1; m <= n_ph; ++m) {
        const double r = std::sqrt(static_cast<double>(m)) * f(m);
        CHECK(std::abs(H(flat_index(1, m - 1), flat_index(2, m)) -
                       cplx{p.lambda2 * r, 0.0}) < 1e-14);
        CHECK(std::abs(H(flat_index(1, m - 1), flat_index(3, m)) -
                       cplx{p.lambda1 * r, 0.0}) < 1e-14);
    }
    // nothing else: zero against levels 2<->3 and photon jumps != 1
    CHECK(std::abs(H(flat_index(2, 3), flat_index(3, 3))) == 0.0);
    CHECK(std::abs(H(flat_index(1, 1), flat_index(2, 4))) == 0.0);

    CHECK_THROWS_AS(oracle::build_hamiltonian(p, f, -1), std::invalid_argument);
}

TEST_CASE("a vanishing coupling profile leaves only the free Hamiltonian") {
    // lambda = 0 is rejected by parameter validation, so an identically zero
    // profile stands in for the free-field case.
    const ModelParams p = ModelParams::scaled(1.0, 0.4, 7.0, 15.0);
    const NonlinearityFn zero =
        NonlinearityFn::from_excitations(std::vector<double>(13, 0.0));
    const Eigen::MatrixXcd H = oracle::build_hamiltonian(p, zero, 12);
    for (int i = 0; i < H.rows(); ++i)
        for (int j = 0; j < H.cols(); ++j)
            if (i != j) CHECK(H(i, j) == cplx{});
}

TEST_CASE("deformed lowering operator obeys [R, n] = R") {
    for (const NonlinearityFn& f :
         {NonlinearityFn::constant(), NonlinearityFn::inverse_sqrt()}) {
        const int n_ph = 30;
        const Eigen::MatrixXcd R = build_R(f, n_ph);
        Eigen::MatrixXcd n_op =
            Eigen::MatrixXcd::Zero(n_ph + 1, n_ph + 1);
        for (int m = 0; m <= n_ph; ++m) n_op(m, m) = m;
        const Eigen::MatrixXcd comm = R * n_op - n_op * R;
        CHECK((comm - R).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("the Hamiltonian conserves the excitation number") {
    const NonlinearityFn kinds[] = {NonlinearityFn::constant(),
                                    NonlinearityFn::inverse_sqrt()};
    for (int k = 0; k < 2; ++k) {
        const ModelParams p = ModelParams::scaled(1.0, 0.4, 7.0, 15.0);
        const int n_ph = 17;
        const Eigen::MatrixXcd H = oracle::build_hamiltonian(p, kinds[k], n_ph);
        const Eigen::MatrixXcd N = build_excitation(n_ph);
        // exact conservation even at the truncation edge: the commutator of
        // the coupling terms vanishes entry by entry
        CHECK((H * N - N * H).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("eigenstates only pick up a phase") {
    const ModelParams p = ModelParams::scaled(1.0, 0.4, 0.0, 0.0);
    const Eigen::MatrixXcd H =
        oracle::build_hamiltonian(p, NonlinearityFn::constant(), 5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const oracle::Propagator prop(H);
    for (int k : {0, 3, 11}) {
        const Eigen::VectorXcd v = es.eigenvectors().col(k);
        const double E = es.eigenvalues()(k);
        const double t = 2.7;
        const Eigen::VectorXcd got = prop.at(v, t);
        const Eigen::VectorXcd expect = std::polar(1.0, -E * t) * v;
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("resonant Rabi populations from a Fock state") {
    const ModelParams p = ModelParams::scaled(1.0, 0.0, 0.0, 0.0);
    const int n = 3;
    const double g = std::sqrt(2.0 * (n + 1));  // lambda sqrt(2(n+1))
    const Eigen::MatrixXcd H =
        oracle::build_hamiltonian(p, NonlinearityFn::constant(), 6);
    const oracle::Propagator prop(H);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(H.rows());
    psi0(flat_index(1, n)) = 1.0;
    for (double t : {0.2, 0.9, 2.5}) {
        const Eigen::VectorXcd psi = prop.at(psi0, t);
        const double p1 = std::norm(psi(flat_index(1, n)));
        const double p2 = std::norm(psi(flat_index(2, n + 1)));
        const double p3 = std::norm(psi(flat_index(3, n + 1)));
        const double c = std::cos(g * t), s = std::sin(g * t);
        CHECK(std::abs(p1 - c * c) < 1e-10);
        CHECK(std::abs(p2 - 0.5 * s * s) < 1e-10);
        CHECK(std::abs(p3 - 0.5 * s * s) < 1e-10);
        CHECK(std::abs(p1 + p2 + p3 - 1.0) < 1e-12);
    }
}

TEST_CASE("integrator input validation") {
    const ModelParams p = ModelParams::scaled(1.0, 0.0, 0.0, 0.0);
    const Eigen::MatrixXcd H =
        oracle::build_hamiltonian(p, NonlinearityFn::constant(), 4);
    Eigen::VectorXcd good = Eigen::VectorXcd::Zero(H.rows());
    good(0) = 1.0;
    CHECK_THROWS_AS(
        oracle::integrate(H, Eigen::VectorXcd::Zero(H.rows() - 3), 1.0),
        std::invalid_argument);
    CHECK_THROWS_AS(oracle::integrate(H, 0.5 * good, 1.0),
                    std::invalid_argument);

    const auto r0 = oracle::integrate(H, good, 0.0);
    CHECK((r0.psi - good).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r0.steps == 0);
}

TEST_CASE("wild steps blow the norm and are reported") {
    const ModelParams p = ModelParams::scaled(1.0, 0.4, 0.0, 0.0);
    const FieldState field = coherent_field(1.0, TruncationPolicy{1e-8, 6});
    const Eigen::MatrixXcd H =
        oracle::build_hamiltonian(p, NonlinearityFn::constant(),
                                  field.n_max() + 1);
    oracle::IntegratorConfig cfg;
    cfg.dt = 0.5;  // ||H|| dt far outside the stability region
    CHECK_THROWS_AS(
        oracle::integrate(H, oracle::embed_initial(field), 5.0, cfg),
        std::runtime_error);
}

TEST_CASE("fixed-step integration converges to the exact propagator") {
    const ModelParams p = ModelParams::scaled(1.0, 0.4, 0.0, 0.0);
    const NonlinearityFn f = NonlinearityFn::inverse_sqrt();
    const FieldState field = coherent_field(1.0, TruncationPolicy{1e-10, 6});
    const Eigen::MatrixXcd H =
        oracle::build_hamiltonian(p, f, field.n_max() + 1);
    const Eigen::VectorXcd psi0 = oracle::embed_initial(field);
    const double T = 1.0;

    oracle::IntegratorConfig exact;
    exact.method = oracle::IntegratorConfig::Method::diagonalize;
    const Eigen::VectorXcd ref = oracle::integrate(H, psi0, T, exact).psi;

    // default step cap: phase error ~ (0.05)^4 per step
    const auto coarse = oracle::integrate(H, psi0, T);
    CHECK(coarse.steps > 100);
    CHECK((coarse.psi - ref).norm() < 1e-6);
    CHECK(coarse.norm_drift < 1e-8);

    // fourth-order self-convergence at fixed small steps
    oracle::IntegratorConfig c1, c2;
    c1.dt = 2e-5;
    c2.dt = 1e-5;
    const Eigen::VectorXcd psi1 = oracle::integrate(H, psi0, T, c1).psi;
    const Eigen::VectorXcd psi2 = oracle::integrate(H, psi0, T, c2).psi;
    CHECK((psi1 - psi2).norm() < 1e-9);
    CHECK((psi2 - ref).norm() < (psi1 - ref).norm());
}

TEST_CASE("fidelity gap endpoints") {
    const FieldState field = coherent_field(0.0);
    const ModelParams p = ModelParams::scaled(1.0, 0.0, 0.0, 0.0);
    const NonlinearityFn f = NonlinearityFn::constant();
    const JointState s = evolve_state(field, p, f, 0.0);

    // Self-overlap lands within rounding of 1, not on it.
    CHECK(oracle::fidelity_gap(s, oracle::embed(s)) < 1e-12);

    // orthogonal state: all weight on |2, 0> while the joint state starts in
    // |1, 0>
    Eigen::VectorXcd orth = Eigen::VectorXcd::Zero(3 * (field.n_max() + 2));
    orth(flat_index(2, 0)) = 1.0;
    CHECK(oracle::fidelity_gap(s, orth) == 1.0);

    CHECK_THROWS_AS(oracle::fidelity_gap(s, Eigen::VectorXcd::Zero(3)),
                    std::invalid_argument);
}

TEST_CASE("closed form tracks the integrator in the detuned regime") {
    const FieldState field = coherent_field(2.0);  // |alpha|^2 = 4
    const ModelParams p = ModelParams::scaled(1.0, 0.0, 7.0, 15.0);
    for (const NonlinearityFn& f :
         {NonlinearityFn::constant(), NonlinearityFn::inverse_sqrt()})
        for (double t : {1.0, 5.0, 10.0})
            CHECK(oracle::fidelity_gap(field, p, f, t) < 1e-8);
}

TEST_CASE("no probability leaks to the truncation edge") {
    // Zero-padding the field must leave the padded levels empty: the
    // excitation number ties each sector to itself, so unoccupied sectors
    // stay unoccupied.
    FieldState field = coherent_field(2.0);
    const int occupied = field.n_max();
    field.q.resize(field.q.size() + 12, cplx{});
    const ModelParams p = ModelParams::scaled(1.0, 0.4, 7.0, 15.0);
    const NonlinearityFn f = NonlinearityFn::inverse_sqrt();
    const Eigen::MatrixXcd H =
        oracle::build_hamiltonian(p, f, field.n_max() + 1);
    const Eigen::VectorXcd psi =
        oracle::Propagator(H).at(oracle::embed_initial(field), 3.0);
    double beyond = 0.0;
    for (int m = occupied + 2; m <= field.n_max() + 1; ++m)
        for (int lvl = 1; lvl <= 3; ++lvl)
            beyond += std::norm(psi(flat_index(lvl, m)));
    CHECK(beyond < 1e-10);
    // and the closed form still matches on the padded space
    CHECK(oracle::fidelity_gap(evolve_state(field, p, f, 3.0), psi) < 1e-8);
}
