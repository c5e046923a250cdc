#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace ljcm {

using cplx = std::complex<double>;

// Detunings of the two lower levels relative to the upper level and the mode:
// delta_j = omega_j - omega_1 + Omega for j = 2, 3.
std::pair<double, double> detunings(double omega1, double omega2, double omega3,
                                    double Omega);

// Physical constants of the three-level Lambda atom coupled to a single
// Kerr-modified cavity mode (hbar = 1). Level 1 is the upper level; levels 2
// and 3 form the lower doublet. lambda2 couples 1<->2, lambda1 couples 1<->3.
// delta2/delta3 are stored derived values, kept consistent by the factories.
struct ModelParams {
    double omega1 = 0.0, omega2 = 0.0, omega3 = 0.0;  // level energies
    double Omega = 0.0;                               // mode frequency
    double lambda1 = 1.0, lambda2 = 1.0;              // coupling rates, > 0
    double chi = 0.0;                                 // Kerr strength
    double delta2 = 0.0, delta3 = 0.0;                // derived detunings

    static ModelParams make(double omega1, double omega2, double omega3,
                            double Omega, double lambda1, double lambda2,
                            double chi);

    // Scaled parameterisation used by the CLI: lambda1 = lambda2 = lambda sets
    // the time unit, detunings and chi are given as ratios. Absolute level and
    // mode frequencies cancel in every reported observable, so omega1 and
    // Omega are pinned to lambda.
    static ModelParams scaled(double lambda, double chi_over_lambda,
                              double delta2_over_lambda,
                              double delta3_over_lambda);

    void validate() const;  // throws std::invalid_argument
};

// Intensity-dependent coupling profile f(n), defined for n >= 1. The custom
// kind is given by a table of mean excitations e_n = n f^2(n), n = 1..K;
// entries may be zero (the affected sector then decouples exactly).
class NonlinearityFn {
  public:
    enum class Kind { constant, inverse_sqrt, custom };

    static NonlinearityFn constant();
    static NonlinearityFn inverse_sqrt();
    static NonlinearityFn from_excitations(std::vector<double> e_table);

    // f(n). Throws std::domain_error for n <= 0 (f(0) is never meaningful and
    // a silent value would mask caller bugs) and std::out_of_range past the
    // custom table.
    double operator()(int n) const;

    Kind kind() const { return kind_; }
    int table_size() const { return static_cast<int>(e_.size()); }

  private:
    explicit NonlinearityFn(Kind k) : kind_(k) {}
    Kind kind_;
    std::vector<double> e_;
};

// Fock-space truncation: keep the smallest N with Poisson tail below epsilon,
// plus margin extra levels so moments up to <a^6> are uncorrupted.
struct TruncationPolicy {
    double epsilon = 1e-12;
    int margin = 8;  // minimum 6

    void validate() const;  // throws std::invalid_argument
};

int choose_truncation(double mean_photons, const TruncationPolicy& policy);

// Pure initial field: amplitudes q_n over photon numbers 0..n_max.
struct FieldState {
    std::vector<cplx> q;

    int n_max() const { return static_cast<int>(q.size()) - 1; }
    double prob(int n) const { return std::norm(q[static_cast<size_t>(n)]); }
    double norm_sq() const;
    double mean_photons() const;
};

// Coherent state amplitudes q_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built
// in log space so large |alpha| cannot overflow n!.
FieldState coherent_field(cplx alpha, const TruncationPolicy& policy = {});

}  // namespace ljcm
