#include "ljcm/observables.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace ljcm {

double AtomDensity::trace_real() const {
    return std::real((*this)(0, 0) + (*this)(1, 1) + (*this)(2, 2));
}

AtomDensity reduce_to_atom(const JointState& s) {
    const auto c = level_vectors(s, /*with_phases=*/true);
    AtomDensity rho;
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            cplx acc{};
            const auto& ci = c[static_cast<size_t>(i)];
            const auto& cj = c[static_cast<size_t>(j)];
            for (size_t m = 0; m < ci.size(); ++m)
                acc += ci[m] * std::conj(cj[m]);
            rho(i, j) = acc;
            rho(j, i) = std::conj(acc);  // Hermitian by construction
        }
    }
    return rho;
}

EigenTriple eigenvalues_cardano(const AtomDensity& rho) {
    double herm_dev = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            herm_dev = std::max(herm_dev,
                                std::abs(rho(i, j) - std::conj(rho(j, i))));
    if (herm_dev > 1e-12)
        throw std::invalid_argument(fmt::format(
            "density matrix not Hermitian (deviation {:.3e})", herm_dev));
    const double tr = rho.trace_real();
    if (std::abs(tr - 1.0) > 1e-12)
        throw std::invalid_argument(
            fmt::format("density matrix trace {} != 1", tr));

    const double r11 = std::real(rho(0, 0));
    const double r22 = std::real(rho(1, 1));
    const double r33 = std::real(rho(2, 2));
    EigenTriple out;
    out.alpha1 = -(r11 + r22 + r33);
    out.alpha2 = r11 * r22 + r22 * r33 + r33 * r11 - std::norm(rho(0, 1)) -
                 std::norm(rho(1, 2)) - std::norm(rho(0, 2));
    // -det(rho); the determinant of a Hermitian matrix is real.
    out.alpha3 = -std::real(
        r11 * (r22 * r33 - std::norm(rho(1, 2))) -
        rho(0, 1) * (std::conj(rho(0, 1)) * r33 -
                     rho(1, 2) * std::conj(rho(0, 2))) +
        rho(0, 2) * (std::conj(rho(0, 1)) * std::conj(rho(1, 2)) -
                     r22 * std::conj(rho(0, 2))));

    const CubicSolution cs = solve_cubic(out.alpha1, out.alpha2, out.alpha3);
    out.beta = cs.theta;
    for (size_t j = 0; j < 3; ++j) {
        double xi = cs.mu[j];
        if (xi < -1e-8 || xi > 1.0 + 1e-8)
            throw std::runtime_error(fmt::format(
                "density eigenvalue {} outside [0, 1] beyond tolerance", xi));
        out.xi[j] = std::clamp(xi, 0.0, 1.0);
    }
    return out;
}

double field_entropy(const EigenTriple& t) {
    double s = 0.0;
    for (double xi : t.xi)
        if (xi > 0.0) s -= xi * std::log(xi);
    return s;
}

double field_entropy(const JointState& s) {
    // The truncated field support leaves the joint norm at 1 - O(epsilon);
    // evaluate the entropy of the normalized reduced state.
    AtomDensity rho = reduce_to_atom(s);
    const double tr = rho.trace_real();
    for (cplx& z : rho.rho) z /= tr;
    return field_entropy(eigenvalues_cardano(rho));
}

double photon_moments(const JointState& s, int k) {
    if (k < 1 || k > 3)
        throw std::invalid_argument(
            fmt::format("photon moment order {} outside 1..3", k));
    double acc = 0.0;
    for (int n = 0; n <= s.n_max(); ++n) {
        const auto& tr = s.triples[static_cast<size_t>(n)];
        double nk = 1.0, n1k = 1.0;
        for (int i = 0; i < k; ++i) {
            nk *= n;
            n1k *= n + 1;
        }
        acc += s.field.prob(n) *
               (nk * std::norm(tr.A) + n1k * (std::norm(tr.B) + std::norm(tr.C)));
    }
    return acc;
}

cplx ladder_moment(const JointState& s, int r, LadderFrame frame) {
    if (r < 1 || r > 6)
        throw std::invalid_argument(
            fmt::format("ladder moment order {} outside 1..6", r));
    cplx acc{};
    for (int n = 0; n + r <= s.n_max(); ++n) {
        const auto& lo = s.triples[static_cast<size_t>(n)];
        const auto& hi = s.triples[static_cast<size_t>(n + r)];
        double wA = 1.0, wBC = 1.0;  // sqrt((n+r)!/n!), sqrt((n+1+r)!/(n+1)!)
        for (int i = 1; i <= r; ++i) {
            wA *= std::sqrt(static_cast<double>(n + i));
            wBC *= std::sqrt(static_cast<double>(n + 1 + i));
        }
        acc += std::conj(s.field.q[static_cast<size_t>(n)]) *
               s.field.q[static_cast<size_t>(n + r)] *
               (wA * std::conj(lo.A) * hi.A +
                wBC * (std::conj(lo.B) * hi.B + std::conj(lo.C) * hi.C));
    }
    if (frame == LadderFrame::lab)
        acc *= std::polar(1.0, -r * s.params.Omega * s.t);
    return acc;
}

double mandel_q(const JointState& s) {
    const double mean = photon_moments(s, 1);
    if (mean <= 0.0)
        throw std::domain_error(
            "photon statistics undefined: <n> = 0 (vacuum field)");
    const double m2 = photon_moments(s, 2);
    return (m2 - mean * mean - mean) / mean;
}

SqueezingPair squeezing(const JointState& s, int order) {
    const auto re = [](cplx z) { return std::real(z); };
    const auto im = [](cplx z) { return std::imag(z); };
    switch (order) {
        case 1: {
            const double n1 = photon_moments(s, 1);
            const cplx a1 = ladder_moment(s, 1);
            const cplx a2 = ladder_moment(s, 2);
            return {2.0 * n1 + 2.0 * re(a2) - 4.0 * re(a1) * re(a1),
                    2.0 * n1 - 2.0 * re(a2) - 4.0 * im(a1) * im(a1)};
        }
        case 2: {
            const double n1 = photon_moments(s, 1);
            const double n2 = photon_moments(s, 2);
            const cplx a2 = ladder_moment(s, 2);
            const cplx a4 = ladder_moment(s, 4);
            const double den = 4.0 * n1 + 2.0;
            return {(2.0 * re(a4) + 2.0 * n2 - 2.0 * n1 -
                     4.0 * re(a2) * re(a2)) /
                        den,
                    (2.0 * n2 - 2.0 * n1 - 2.0 * re(a4) -
                     4.0 * im(a2) * im(a2)) /
                        den};
        }
        case 3: {
            const double n1 = photon_moments(s, 1);
            const double n2 = photon_moments(s, 2);
            const double n3 = photon_moments(s, 3);
            const cplx a3 = ladder_moment(s, 3);
            const cplx a6 = ladder_moment(s, 6);
            const double den = 9.0 * n2 + 9.0 * n1 + 6.0;
            return {(2.0 * re(a6) + 2.0 * n3 - 6.0 * n2 + 4.0 * n1 -
                     4.0 * re(a3) * re(a3)) /
                        den,
                    (2.0 * n3 - 6.0 * n2 + 4.0 * n1 - 2.0 * re(a6) -
                     4.0 * im(a3) * im(a3)) /
                        den};
        }
        default:
            throw std::invalid_argument(
                fmt::format("squeezing order {} outside 1..3", order));
    }
}

namespace {

double husimi_diagonal(const JointState& s, double a2) {
    // (1/pi) e^{-a2} sum_n (a2^n / n!) P_n [|A|^2 + a2/(n+1) (|B|^2 + |C|^2)];
    // the Poisson weight is built by recurrence and never exceeds 1.
    double w = std::exp(-a2);
    double acc = 0.0;
    for (int n = 0; n <= s.n_max(); ++n) {
        const auto& tr = s.triples[static_cast<size_t>(n)];
        acc += w * s.field.prob(n) *
               (std::norm(tr.A) +
                a2 / (n + 1) * (std::norm(tr.B) + std::norm(tr.C)));
        w *= a2 / (n + 1);
    }
    return acc / std::numbers::pi;
}

double husimi_exact(const JointState& s, cplx alpha_pt) {
    const auto c = level_vectors(s, /*with_phases=*/false);
    const size_t dim = c[0].size();
    // <alpha|m> = e^{-|alpha|^2/2} conj(alpha)^m / sqrt(m!), by recurrence.
    cplx d = std::exp(-0.5 * std::norm(alpha_pt));
    double acc = 0.0;
    std::array<cplx, 3> overlap{};
    for (size_t m = 0; m < dim; ++m) {
        for (size_t lvl = 0; lvl < 3; ++lvl) overlap[lvl] += d * c[lvl][m];
        d *= std::conj(alpha_pt) / std::sqrt(static_cast<double>(m + 1));
    }
    for (const cplx& o : overlap) acc += std::norm(o);
    return acc / std::numbers::pi;
}

}  // namespace

double husimi_point(const JointState& s, cplx alpha_pt, HusimiMode mode) {
    return mode == HusimiMode::diagonal
               ? husimi_diagonal(s, std::norm(alpha_pt))
               : husimi_exact(s, alpha_pt);
}

double HusimiGrid::quadrature() const {
    const double dx = (x_max - x_min) / (resolution - 1);
    const double dy = (y_max - y_min) / (resolution - 1);
    double acc = 0.0;
    for (int iy = 0; iy < resolution; ++iy) {
        const double wy = (iy == 0 || iy == resolution - 1) ? 0.5 : 1.0;
        for (int ix = 0; ix < resolution; ++ix) {
            const double wx = (ix == 0 || ix == resolution - 1) ? 0.5 : 1.0;
            acc += wx * wy * value(ix, iy);
        }
    }
    return acc * dx * dy;
}

HusimiGrid husimi_grid(const JointState& s, std::pair<double, double> x_range,
                       std::pair<double, double> y_range, int resolution,
                       HusimiMode mode) {
    if (resolution < 2)
        throw std::invalid_argument("grid resolution must be >= 2");
    if (!(x_range.first < x_range.second) || !(y_range.first < y_range.second))
        throw std::invalid_argument("grid ranges must be nonempty intervals");
    HusimiGrid g;
    g.x_min = x_range.first;
    g.x_max = x_range.second;
    g.y_min = y_range.first;
    g.y_max = y_range.second;
    g.resolution = resolution;
    g.values.resize(static_cast<size_t>(resolution) *
                    static_cast<size_t>(resolution));
    for (int iy = 0; iy < resolution; ++iy)
        for (int ix = 0; ix < resolution; ++ix)
            g.values[static_cast<size_t>(iy) * static_cast<size_t>(resolution) +
                     static_cast<size_t>(ix)] =
                husimi_point(s, cplx{g.x_at(ix), g.y_at(iy)}, mode);
    return g;
}

}  // namespace ljcm
