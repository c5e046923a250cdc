#pragma once

#include <utility>

#include "ljcm/dynamics.hpp"

namespace ljcm {

// Reduced 3x3 density matrix of the atom, row-major over levels 1..3.
struct AtomDensity {
    std::array<cplx, 9> rho{};

    cplx operator()(int i, int j) const {
        return rho[static_cast<size_t>(3 * i + j)];
    }
    cplx& operator()(int i, int j) {
        return rho[static_cast<size_t>(3 * i + j)];
    }
    double trace_real() const;
};

// Exact partial trace over the field, free-evolution phases included.
AtomDensity reduce_to_atom(const JointState& s);

// Eigenvalues of the reduced density by the trigonometric solution of its
// characteristic cubic xi^3 + alpha1 xi^2 + alpha2 xi + alpha3 = 0.
struct EigenTriple {
    std::array<double, 3> xi{};  // sorted descending, clamped to [0, 1]
    double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
    double beta = 0.0;  // auxiliary angle
};

// Throws std::invalid_argument when rho is not Hermitian/unit-trace, and a
// numerical-consistency std::runtime_error when an eigenvalue needs clamping
// by more than 1e-8.
EigenTriple eigenvalues_cardano(const AtomDensity& rho);

double field_entropy(const EigenTriple& t);
// Convenience: trace out the field and evaluate the von Neumann entropy. For
// the pure joint state this equals the field entropy (shared spectrum).
double field_entropy(const JointState& s);

// <n^k> for k in {1, 2, 3}; the joint state is diagonal in photon number for
// number-operator moments.
double photon_moments(const JointState& s, int k);

// <a^r> for r in 1..6. The interaction frame evaluates the slowly varying
// amplitudes only (this is what the squeezing parameters are built from);
// the lab frame appends the free-rotation factor e^{-i r Omega t}.
enum class LadderFrame { interaction, lab };
cplx ladder_moment(const JointState& s, int r,
                   LadderFrame frame = LadderFrame::interaction);

// Q = (<n^2> - <n>^2 - <n>)/<n>; throws std::domain_error when <n> = 0.
double mandel_q(const JointState& s);

struct SqueezingPair {
    double s_x = 0.0, s_y = 0.0;
};

// Normalized squeezing parameters of order k in {1, 2, 3} for the quadrature
// pair built from a^k; both lie in [-1, inf).
SqueezingPair squeezing(const JointState& s, int order);

// Husimi Q-distribution at a phase-space point. diagonal evaluates the
// photon-number-diagonal closed form (the plotted quantity); exact evaluates
// the full coherent-state overlap (1/pi) sum_level |<alpha|c_level>|^2 with
// free-rotation phases stripped.
enum class HusimiMode { diagonal, exact };

double husimi_point(const JointState& s, cplx alpha_pt,
                    HusimiMode mode = HusimiMode::diagonal);

struct HusimiGrid {
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    int resolution = 0;
    std::vector<double> values;  // row-major over y then x

    double value(int ix, int iy) const {
        return values[static_cast<size_t>(iy) * static_cast<size_t>(resolution) +
                      static_cast<size_t>(ix)];
    }
    double x_at(int ix) const {
        return x_min + (x_max - x_min) * ix / (resolution - 1);
    }
    double y_at(int iy) const {
        return y_min + (y_max - y_min) * iy / (resolution - 1);
    }
    double quadrature() const;  // trapezoidal mass over the grid
};

HusimiGrid husimi_grid(const JointState& s, std::pair<double, double> x_range,
                       std::pair<double, double> y_range, int resolution,
                       HusimiMode mode = HusimiMode::diagonal);

}  // namespace ljcm
