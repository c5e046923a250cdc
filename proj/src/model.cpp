#include "ljcm/model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace ljcm {

std::pair<double, double> detunings(double omega1, double omega2, double omega3,
                                    double Omega) {
    return {omega2 - omega1 + Omega, omega3 - omega1 + Omega};
}

ModelParams ModelParams::make(double omega1, double omega2, double omega3,
                              double Omega, double lambda1, double lambda2,
                              double chi) {
    ModelParams p;
    p.omega1 = omega1;
    p.omega2 = omega2;
    p.omega3 = omega3;
    p.Omega = Omega;
    p.lambda1 = lambda1;
    p.lambda2 = lambda2;
    p.chi = chi;
    std::tie(p.delta2, p.delta3) = detunings(omega1, omega2, omega3, Omega);
    p.validate();
    return p;
}

ModelParams ModelParams::scaled(double lambda, double chi_over_lambda,
                                double delta2_over_lambda,
                                double delta3_over_lambda) {
    // omega1 = Omega = lambda, the lower levels placed to realise the
    // requested detunings: omega_j = omega1 + delta_j - Omega.
    const double omega1 = lambda;
    const double Omega = lambda;
    return make(omega1, omega1 + delta2_over_lambda * lambda - Omega,
                omega1 + delta3_over_lambda * lambda - Omega, Omega, lambda,
                lambda, chi_over_lambda * lambda);
}

void ModelParams::validate() const {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
        throw std::invalid_argument(
            fmt::format("coupling rates must be positive (lambda1={}, lambda2={})",
                        lambda1, lambda2));
    for (double v : {omega1, omega2, omega3, Omega, lambda1, lambda2, chi})
        if (!std::isfinite(v))
            throw std::invalid_argument("model parameters must be finite");
    const auto [d2, d3] = detunings(omega1, omega2, omega3, Omega);
    if (delta2 != d2 || delta3 != d3)
        throw std::invalid_argument(
            "stored detunings inconsistent with level energies");
}

NonlinearityFn NonlinearityFn::constant() {
    return NonlinearityFn(Kind::constant);
}

NonlinearityFn NonlinearityFn::inverse_sqrt() {
    return NonlinearityFn(Kind::inverse_sqrt);
}

NonlinearityFn NonlinearityFn::from_excitations(std::vector<double> e_table) {
    if (e_table.empty())
        throw std::invalid_argument("excitation table must not be empty");
    for (size_t i = 0; i < e_table.size(); ++i)
        if (!(e_table[i] >= 0.0) || !std::isfinite(e_table[i]))
            throw std::invalid_argument(fmt::format(
                "excitation table entry e_{} = {} must be finite and >= 0",
                i + 1, e_table[i]));
    NonlinearityFn f(Kind::custom);
    f.e_ = std::move(e_table);
    return f;
}

double NonlinearityFn::operator()(int n) const {
    if (n <= 0)
        throw std::domain_error(
            fmt::format("coupling profile f({}) is undefined (n >= 1 required)", n));
    switch (kind_) {
        case Kind::constant:
            return 1.0;
        case Kind::inverse_sqrt:
            return 1.0 / std::sqrt(static_cast<double>(n));
        case Kind::custom:
            if (n > static_cast<int>(e_.size()))
                throw std::out_of_range(fmt::format(
                    "excitation table has {} entries; f({}) requested",
                    e_.size(), n));
            return std::sqrt(e_[static_cast<size_t>(n - 1)] /
                             static_cast<double>(n));
    }
    throw std::logic_error("unreachable coupling profile kind");
}

void TruncationPolicy::validate() const {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument(
            fmt::format("truncation epsilon {} outside (0, 1)", epsilon));
    if (margin < 6)
        throw std::invalid_argument(fmt::format(
            "truncation margin {} too small; sixth-order moments need >= 6",
            margin));
}

int choose_truncation(double mean_photons, const TruncationPolicy& policy) {
    policy.validate();
    if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons))
        throw std::invalid_argument("mean photon number must be finite and >= 0");
    if (mean_photons > 1e4)
        throw std::invalid_argument(
            "mean photon number too large for dense Fock-space handling");
    if (mean_photons == 0.0) return policy.margin;
    // Smallest N with Poisson tail beyond N below epsilon. Accumulated in
    // extended precision; the pmf recurrence stays in [0, 1] throughout.
    long double p = std::exp(-static_cast<long double>(mean_photons));
    long double cum = p;
    int N = 0;
    while (1.0L - cum >= static_cast<long double>(policy.epsilon)) {
        ++N;
        p *= mean_photons / N;
        cum += p;
    }
    return N + policy.margin;
}

double FieldState::norm_sq() const {
    double s = 0.0;
    for (const cplx& a : q) s += std::norm(a);
    return s;
}

double FieldState::mean_photons() const {
    double s = 0.0;
    for (size_t n = 0; n < q.size(); ++n) s += static_cast<double>(n) * std::norm(q[n]);
    return s;
}

FieldState coherent_field(cplx alpha, const TruncationPolicy& policy) {
    const double a2 = std::norm(alpha);
    FieldState fs;
    fs.q.assign(static_cast<size_t>(choose_truncation(a2, policy)) + 1, cplx{0.0, 0.0});
    if (a2 == 0.0) {
        fs.q[0] = 1.0;
        return fs;
    }
    const double log_a2 = std::log(a2);
    const double phase = std::arg(alpha);
    for (size_t n = 0; n < fs.q.size(); ++n) {
        const double nn = static_cast<double>(n);
        const double log_mag = -0.5 * a2 + 0.5 * (nn * log_a2 - std::lgamma(nn + 1.0));
        fs.q[n] = std::polar(std::exp(log_mag), nn * phase);
    }
    return fs;
}

}  // namespace ljcm
