#pragma once

#include <Eigen/Dense>

#include "ljcm/dynamics.hpp"

// Independent brute-force verifier: the full Hamiltonian on the truncated
// joint space, integrated numerically, shares nothing with the closed-form
// path but the parameter structs.
namespace ljcm::oracle {

// Flat joint-basis layout: index = 3*m + (level - 1), photons m >= 0.
int flat_index(int level, int m);

// Dense H = sum_j omega_j sigma_jj + Omega a^dag a + chi a^dag^2 a^2
//         + lambda1 (R sigma_13 + sigma_31 R^dag)
//         + lambda2 (R sigma_12 + sigma_21 R^dag)
// with <m-1|R|m> = sqrt(m) f(m), on photon levels 0..n_max_photons.
Eigen::MatrixXcd build_hamiltonian(const ModelParams& p,
                                   const NonlinearityFn& f, int n_max_photons);

struct IntegratorConfig {
    enum class Method { rk4, diagonalize };
    Method method = Method::rk4;
    double max_phase_per_step = 0.05;  // ||H||_inf * dt cap for the default dt
    double dt = 0.0;                   // explicit step override when > 0
    bool renormalize = false;          // off: norm drift is a diagnostic
    double norm_tol = 1e-6;
};

struct IntegrationResult {
    Eigen::VectorXcd psi;
    double norm_drift = 0.0;  // | ||psi||^2 - 1 |
    long steps = 0;
};

// Solve i dpsi/dt = H psi from a normalized psi0. Fixed-step classical RK4 by
// default; Method::diagonalize propagates through the eigendecomposition
// (exact up to roundoff). Throws when the final norm drifts beyond norm_tol.
IntegrationResult integrate(const Eigen::MatrixXcd& H,
                            const Eigen::VectorXcd& psi0, double t,
                            const IntegratorConfig& cfg = {});

// Cached eigendecomposition for repeated exact propagation under one H.
class Propagator {
  public:
    explicit Propagator(const Eigen::MatrixXcd& H);
    Eigen::VectorXcd at(const Eigen::VectorXcd& psi0, double t) const;

  private:
    Eigen::MatrixXcd U_;
    Eigen::VectorXd E_;
};

// Lab-frame embedding of the analytic state (amplitudes x phase factors) in
// the flat basis; photon space 0..n_max+1, dimension 3(n_max+2).
Eigen::VectorXcd embed(const JointState& s);

// Excited atom ⊗ field: psi[3m] = q_m.
Eigen::VectorXcd embed_initial(const FieldState& field);

// 1 - |<psi_num|psi_ana>|; both sides live in the lab frame, so no global
// phase adjustment is needed.
double fidelity_gap(const JointState& analytic, const Eigen::VectorXcd& numeric);

// Convenience: build H, propagate the initial product state exactly to t, and
// compare with the closed form.
double fidelity_gap(const FieldState& field, const ModelParams& p,
                    const NonlinearityFn& f, double t);

}  // namespace ljcm::oracle
