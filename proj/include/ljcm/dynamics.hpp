#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "ljcm/model.hpp"

namespace ljcm {

// Couplings and Kerr shifts of the photon sector spanned by
// {|1,n>, |2,n+1>, |3,n+1>}; the excitation number a^dag a + sigma_11 ties
// these three states together, so the dynamics block-diagonalises over n.
struct SectorCouplings {
    int n = 0;
    double f1 = 0.0, f2 = 0.0;  // lambda_i sqrt(n+1) f(n+1)
    double V1 = 0.0, V2 = 0.0;  // chi n(n-1), chi n(n+1)
};

SectorCouplings sector_couplings(int n, const ModelParams& p,
                                 const NonlinearityFn& f);

struct CubicCoefficients {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;
};

// Coefficients of the sector characteristic cubic mu^3 + x1 mu^2 + x2 mu + x3.
// With a = V2, b = V1 - delta2, c = V2 + delta3 - delta2 the oscillatory
// ansatz reduces the sector ODE system to
//   [(mu + a)(mu + b) - f2^2](mu + c) = f1^2 (mu + a),
// i.e. mu are the eigenvalues of the negated real-symmetric matrix
//   [[b, f2, f1], [f2, a, 0], [f1, 0, c]],
// which also guarantees three real roots.
CubicCoefficients cubic_coefficients(const SectorCouplings& sc, double delta2,
                                     double delta3);

struct CubicSolution {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;
    std::array<double, 3> mu{};  // real roots, sorted descending
    double theta = 0.0;          // auxiliary angle of the trigonometric form
    bool degenerate = false;     // gap < 1e-9 * root scale, or unresolvable
};

// Trigonometric (Cardano) solution of a real cubic with three real roots.
CubicSolution solve_cubic(double x1, double x2, double x3);
CubicSolution solve_cubic(const CubicCoefficients& c);

// Thrown when amplitude weights are requested for (numerically) coinciding
// roots; root_a/root_b identify the colliding pair, sector the photon index
// when known.
class DegenerateRootsError : public std::runtime_error {
  public:
    DegenerateRootsError(const std::string& what, int root_a, int root_b,
                         int sector = -1)
        : std::runtime_error(what), root_a(root_a), root_b(root_b),
          sector(sector) {}

    int root_a, root_b;
    int sector;
};

// Weights b_j of the three oscillation modes for an initially excited atom
// (A(0) = 1, B(0) = C(0) = 0). Real for real roots and couplings.
struct InitialWeights {
    std::array<double, 3> b{};
};

InitialWeights initial_weights_excited(const CubicSolution& cs,
                                       const SectorCouplings& sc,
                                       double delta2);

// Slowly varying amplitudes of |1,n>, |2,n+1>, |3,n+1> at time t.
struct AmplitudeTriple {
    cplx A{}, B{}, C{};
};

// Per-sector solution cache: the cubic is solved once, after which amplitudes
// cost one complex exponential per root. If the first solve reports
// (numerically) degenerate roots the Kerr strength is perturbed by one part
// in 1e9 and solved again; a persistent degeneracy is surfaced as
// DegenerateRootsError annotated with the sector.
class SectorEvolution {
  public:
    SectorEvolution(int n, const ModelParams& p, const NonlinearityFn& f);

    AmplitudeTriple at(double t) const;

    const SectorCouplings& couplings() const { return sc_; }
    const CubicSolution& roots() const { return cubic_; }
    const InitialWeights& weights() const { return weights_; }
    bool nudged() const { return nudged_; }
    bool decoupled() const { return decoupled_; }

  private:
    void prepare(int n, const ModelParams& p, const NonlinearityFn& f);

    SectorCouplings sc_{};
    CubicSolution cubic_{};
    InitialWeights weights_{};
    double d2_ = 0.0, d3_ = 0.0;
    std::array<double, 3> cA_{}, cB_{}, cC_{};
    bool decoupled_ = false;  // f(n+1) == 0: A = e^{-i V1 t}, B = C = 0 exactly
    bool nudged_ = false;
};

// One-shot convenience wrapper around SectorEvolution.
AmplitudeTriple amplitudes_at(int n, double t, const ModelParams& p,
                              const NonlinearityFn& f);

// Full joint state at time t: per-sector amplitude triples plus the
// free-evolution phase exponents gamma_j(n), kept separate from A/B/C because
// the reduced density matrix needs the exact relative phases.
struct JointState {
    double t = 0.0;
    ModelParams params{};
    FieldState field{};
    std::vector<AmplitudeTriple> triples;           // index = sector n
    std::vector<std::array<double, 3>> gammas;      // {w1 + n W, w2 + (n+1) W, w3 + (n+1) W}

    int n_max() const { return field.n_max(); }
    double norm_sq() const;
    double excitation() const;  // <a^dag a + sigma_11>, a constant of motion
};

// Whole-system evolution: per-sector caches built once, states at arbitrary
// times afterwards. Sectors whose roots needed the Kerr perturbation are
// reported via nudged_sectors().
class SystemEvolution {
  public:
    SystemEvolution(FieldState field, ModelParams params, NonlinearityFn f);

    JointState at(double t) const;
    const std::vector<int>& nudged_sectors() const { return nudged_; }

  private:
    FieldState field_;
    ModelParams params_;
    std::vector<SectorEvolution> sectors_;
    std::vector<std::array<double, 3>> gammas_;
    std::vector<int> nudged_;
};

JointState evolve_state(const FieldState& field, const ModelParams& p,
                        const NonlinearityFn& f, double t);

// Per-level field coefficient vectors of length n_max + 2:
// c1[m] = q_m A(m) e^{-i gamma1(m) t}, c2[m] = q_{m-1} B(m) e^{-i gamma2(m-1) t},
// c3 likewise. with_phases = false drops the free-rotation factors for
// frame-independent overlaps.
std::array<std::vector<cplx>, 3> level_vectors(const JointState& s,
                                               bool with_phases = true);

}  // namespace ljcm
