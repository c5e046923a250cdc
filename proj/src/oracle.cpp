#include "ljcm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <fmt/format.h>

namespace ljcm::oracle {

int flat_index(int level, int m) {
    if (level < 1 || level > 3 || m < 0)
        throw std::invalid_argument("flat_index: level in 1..3, m >= 0");
    return 3 * m + (level - 1);
}

Eigen::MatrixXcd build_hamiltonian(const ModelParams& p,
                                   const NonlinearityFn& f,
                                   int n_max_photons) {
    if (n_max_photons < 0)
        throw std::invalid_argument("build_hamiltonian: n_max_photons >= 0");
    p.validate();

    const int dim = 3 * (n_max_photons + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);

    const double omega[3] = {p.omega1, p.omega2, p.omega3};
    for (int m = 0; m <= n_max_photons; ++m) {
        const double field = p.Omega * m + p.chi * m * (m - 1.0);
        for (int lvl = 1; lvl <= 3; ++lvl) {
            const int i = flat_index(lvl, m);
            H(i, i) = omega[lvl - 1] + field;
        }
    }
    // R sigma_12 takes |2, m> -> <m-1|R|m> |1, m-1>; same pattern for level 3.
    for (int m = 1; m <= n_max_photons; ++m) {
        const double r = std::sqrt(double(m)) * f(m);
        const int up = flat_index(1, m - 1);
        H(up, flat_index(2, m)) += p.lambda2 * r;
        H(flat_index(2, m), up) += p.lambda2 * r;
        H(up, flat_index(3, m)) += p.lambda1 * r;
        H(flat_index(3, m), up) += p.lambda1 * r;
    }
    return H;
}

IntegrationResult integrate(const Eigen::MatrixXcd& H,
                            const Eigen::VectorXcd& psi0, double t,
                            const IntegratorConfig& cfg) {
    if (H.rows() != H.cols() || H.rows() != psi0.size())
        throw std::invalid_argument("integrate: dimension mismatch");
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-8)
        throw std::invalid_argument("integrate: psi0 not normalized");

    IntegrationResult out;
    if (t == 0.0) {
        out.psi = psi0;
        return out;
    }

    if (cfg.method == IntegratorConfig::Method::diagonalize) {
        Propagator prop(H);
        out.psi = prop.at(psi0, t);
        out.norm_drift = std::abs(out.psi.squaredNorm() - 1.0);
        out.steps = 1;
        return out;
    }

    const double hnorm = H.cwiseAbs().rowwise().sum().maxCoeff();
    double dt = cfg.dt > 0.0 ? cfg.dt
                             : (hnorm > 0.0 ? cfg.max_phase_per_step / hnorm
                                            : std::abs(t));
    const long steps = std::max(1L, (long)std::ceil(std::abs(t) / dt));
    dt = t / double(steps);

    const std::complex<double> mi(0.0, -1.0);
    Eigen::VectorXcd psi = psi0;
    Eigen::VectorXcd k1(psi.size()), k2(psi.size()), k3(psi.size()),
        k4(psi.size());
    for (long s = 0; s < steps; ++s) {
        k1 = mi * (H * psi);
        k2 = mi * (H * (psi + 0.5 * dt * k1));
        k3 = mi * (H * (psi + 0.5 * dt * k2));
        k4 = mi * (H * (psi + dt * k3));
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (cfg.renormalize) psi.normalize();
    }

    out.norm_drift = std::abs(psi.squaredNorm() - 1.0);
    if (out.norm_drift > cfg.norm_tol)
        throw std::runtime_error(
            fmt::format("integrate: norm drift {:.3e} exceeds tolerance {:.3e}"
                        " ({} steps); reduce the step size",
                        out.norm_drift, cfg.norm_tol, steps));
    out.psi = std::move(psi);
    out.steps = steps;
    return out;
}

Propagator::Propagator(const Eigen::MatrixXcd& H) {
    if (H.rows() != H.cols())
        throw std::invalid_argument("Propagator: H not square");
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("Propagator: H not hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("Propagator: eigendecomposition failed");
    U_ = es.eigenvectors();
    E_ = es.eigenvalues();
}

Eigen::VectorXcd Propagator::at(const Eigen::VectorXcd& psi0, double t) const {
    if (psi0.size() != U_.rows())
        throw std::invalid_argument("Propagator: dimension mismatch");
    Eigen::VectorXcd c = U_.adjoint() * psi0;
    for (Eigen::Index k = 0; k < c.size(); ++k)
        c[k] *= std::polar(1.0, -E_[k] * t);
    return U_ * c;
}

Eigen::VectorXcd embed(const JointState& s) {
    const auto levels = level_vectors(s);  // lab frame, length n_max + 2
    const int photons = int(levels[0].size());
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3 * photons);
    for (int lvl = 0; lvl < 3; ++lvl)
        for (int m = 0; m < photons; ++m)
            psi[flat_index(lvl + 1, m)] = levels[lvl][m];
    return psi;
}

Eigen::VectorXcd embed_initial(const FieldState& field) {
    const int photons = field.n_max() + 2;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3 * photons);
    for (int m = 0; m <= field.n_max(); ++m)
        psi[flat_index(1, m)] = field.q[m];
    return psi;
}

double fidelity_gap(const JointState& analytic,
                    const Eigen::VectorXcd& numeric) {
    const Eigen::VectorXcd ana = embed(analytic);
    if (ana.size() != numeric.size())
        throw std::invalid_argument("fidelity_gap: dimension mismatch");
    // Eigen's dot conjugates its first argument; rounding can push the
    // overlap of identical states a hair above 1, so clamp at zero.
    return std::max(0.0, 1.0 - std::abs(numeric.dot(ana)));
}

double fidelity_gap(const FieldState& field, const ModelParams& p,
                    const NonlinearityFn& f, double t) {
    const Eigen::MatrixXcd H = build_hamiltonian(p, f, field.n_max() + 1);
    Propagator prop(H);
    const Eigen::VectorXcd psi_num = prop.at(embed_initial(field), t);
    return fidelity_gap(evolve_state(field, p, f, t), psi_num);
}

}  // namespace ljcm::oracle
