#include "ljcm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace ljcm {

SectorCouplings sector_couplings(int n, const ModelParams& p,
                                 const NonlinearityFn& f) {
    if (n < 0) throw std::invalid_argument("photon sector index must be >= 0");
    SectorCouplings sc;
    sc.n = n;
    const double root = std::sqrt(static_cast<double>(n + 1)) * f(n + 1);
    sc.f1 = p.lambda1 * root;
    sc.f2 = p.lambda2 * root;
    sc.V1 = p.chi * n * (n - 1);
    sc.V2 = p.chi * n * (n + 1);
    return sc;
}

CubicCoefficients cubic_coefficients(const SectorCouplings& sc, double delta2,
                                     double delta3) {
    const double a = sc.V2;
    const double b = sc.V1 - delta2;
    const double c = sc.V2 + delta3 - delta2;
    const double f1sq = sc.f1 * sc.f1;
    const double f2sq = sc.f2 * sc.f2;
    return {a + b + c,
            a * b + b * c + c * a - f1sq - f2sq,
            a * b * c - f1sq * a - f2sq * c};
}

CubicSolution solve_cubic(double x1, double x2, double x3) {
    CubicSolution out;
    out.x1 = x1;
    out.x2 = x2;
    out.x3 = x3;

    const double p = x1 * x1 - 3.0 * x2;
    const double h = 9.0 * x1 * x2 - 2.0 * x1 * x1 * x1 - 27.0 * x3;
    const double scale =
        std::max({1.0, std::abs(x1), std::sqrt(std::abs(x2)),
                  std::cbrt(std::abs(x3))});

    // A triple collision drives p to zero and a pair collision drives |h| up
    // against 2 p^{3/2}; both are differences of much larger terms, so a gap
    // hiding below their cancellation noise cannot be resolved here.  Such
    // roots must be reported as degenerate: the divided differences they feed
    // downstream would be pure rounding error.
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double p_err = 4.0 * eps * (x1 * x1 + 3.0 * std::abs(x2));
    const double h_mag = 9.0 * std::abs(x1 * x2) +
                         2.0 * std::abs(x1 * x1 * x1) + 27.0 * std::abs(x3);

    if (p <= p_err) {
        // Three real roots force p >= 0; p == 0 only at an exact triple root
        // (where h == 0 as well). Anything else means the coefficients do not
        // describe a real-rooted cubic.
        const double s2 = scale * scale;
        if (p < -1e-12 * s2 || std::abs(h) > 1e-12 * s2 * scale)
            throw std::runtime_error(fmt::format(
                "cubic solver: real-root branch violated (p = {}, h = {})", p,
                h));
        out.mu = {-x1 / 3.0, -x1 / 3.0, -x1 / 3.0};
        out.theta = 0.0;
        out.degenerate = true;
        return out;
    }

    const double half_span = 2.0 * std::pow(p, 1.5);
    const double arg = std::clamp(h / half_span, -1.0, 1.0);
    out.theta = std::acos(arg) / 3.0;
    const double shift = -x1 / 3.0;
    const double radius = 2.0 / 3.0 * std::sqrt(p);
    for (int j = 0; j < 3; ++j)
        out.mu[static_cast<size_t>(j)] =
            shift + radius * std::cos(out.theta + 2.0 * std::numbers::pi * j / 3.0);
    std::sort(out.mu.begin(), out.mu.end(), std::greater<>());

    const double root_scale = std::max(std::abs(out.mu[0]), std::abs(out.mu[2]));
    const double min_gap =
        std::min(out.mu[0] - out.mu[1], out.mu[1] - out.mu[2]);
    const double h_err = 8.0 * eps * h_mag + 3.0 * std::sqrt(p) * p_err;
    out.degenerate = root_scale == 0.0 || min_gap < 1e-9 * root_scale ||
                     half_span - std::abs(h) <= h_err;
    return out;
}

CubicSolution solve_cubic(const CubicCoefficients& c) {
    return solve_cubic(c.x1, c.x2, c.x3);
}

namespace {

// Indices of the closest pair among three descending-sorted roots.
std::pair<int, int> closest_pair(const std::array<double, 3>& mu) {
    return (mu[0] - mu[1] <= mu[1] - mu[2]) ? std::pair{0, 1} : std::pair{1, 2};
}

}  // namespace

InitialWeights initial_weights_excited(const CubicSolution& cs,
                                       const SectorCouplings& sc,
                                       double delta2) {
    if (cs.degenerate) {
        const auto [a, b] = closest_pair(cs.mu);
        throw DegenerateRootsError(
            fmt::format("degenerate characteristic roots: mu_{} = {} and "
                        "mu_{} = {} coincide within tolerance",
                        a + 1, cs.mu[static_cast<size_t>(a)], b + 1,
                        cs.mu[static_cast<size_t>(b)]),
            a, b);
    }
    InitialWeights w;
    const double num_base = sc.V1 + sc.V2 - delta2;
    for (int j = 0; j < 3; ++j) {
        const int k = (j + 1) % 3;
        const int l = (j + 2) % 3;
        const double mj = cs.mu[static_cast<size_t>(j)];
        const double mk = cs.mu[static_cast<size_t>(k)];
        const double ml = cs.mu[static_cast<size_t>(l)];
        w.b[static_cast<size_t>(j)] =
            (mk + ml + num_base) / ((mj - mk) * (mj - ml));
    }
    return w;
}

void SectorEvolution::prepare(int n, const ModelParams& p,
                              const NonlinearityFn& f) {
    sc_ = sector_couplings(n, p, f);
    d2_ = p.delta2;
    d3_ = p.delta3;
    if (sc_.f1 == 0.0 || sc_.f2 == 0.0) {
        // f(n+1) == 0 removes both couplings (they share the f factor): the
        // upper state only picks up the Kerr phase and B, C stay empty.
        decoupled_ = true;
        return;
    }
    cubic_ = solve_cubic(cubic_coefficients(sc_, d2_, d3_));
    weights_ = initial_weights_excited(cubic_, sc_, d2_);  // throws on degeneracy
    for (size_t j = 0; j < 3; ++j) {
        const double mu = cubic_.mu[j];
        const double b = weights_.b[j];
        cA_[j] = (mu + sc_.V2) * b;
        cB_[j] = sc_.f2 * b;
        cC_[j] = ((mu + sc_.V2) * (mu + sc_.V1 - d2_) - sc_.f2 * sc_.f2) * b /
                 sc_.f1;
    }
}

SectorEvolution::SectorEvolution(int n, const ModelParams& p,
                                 const NonlinearityFn& f) {
    try {
        prepare(n, p, f);
        return;
    } catch (const DegenerateRootsError&) {
        // Perturb the Kerr strength one part in 1e9 (absolute fallback when
        // chi == 0) and retry; amplitudes are continuous in the parameters.
    }
    ModelParams q = p;
    q.chi = (p.chi != 0.0) ? p.chi * (1.0 + 1e-9)
                           : 1e-9 * std::max(p.lambda1, p.lambda2);
    try {
        prepare(n, q, f);
        nudged_ = true;
    } catch (const DegenerateRootsError& e) {
        throw DegenerateRootsError(
            fmt::format("sector n = {}: {} (persists after Kerr perturbation; "
                        "chi = {}, delta2 = {}, delta3 = {}, f1 = {}, f2 = {})",
                        n, e.what(), p.chi, p.delta2, p.delta3, sc_.f1, sc_.f2),
            e.root_a, e.root_b, n);
    }
}

AmplitudeTriple SectorEvolution::at(double t) const {
    if (decoupled_) return {std::polar(1.0, -sc_.V1 * t), cplx{}, cplx{}};
    cplx eA{}, eB{}, eC{};
    for (size_t j = 0; j < 3; ++j) {
        const cplx e = std::polar(1.0, cubic_.mu[j] * t);
        eA += cA_[j] * e;
        eB += cB_[j] * e;
        eC += cC_[j] * e;
    }
    AmplitudeTriple out;
    out.A = -std::polar(1.0, -d2_ * t) * eA;
    out.B = eB;
    out.C = std::polar(1.0, (d3_ - d2_) * t) * eC;
    return out;
}

AmplitudeTriple amplitudes_at(int n, double t, const ModelParams& p,
                              const NonlinearityFn& f) {
    return SectorEvolution(n, p, f).at(t);
}

double JointState::norm_sq() const {
    double s = 0.0;
    for (int n = 0; n <= n_max(); ++n) {
        const auto& tr = triples[static_cast<size_t>(n)];
        s += field.prob(n) *
             (std::norm(tr.A) + std::norm(tr.B) + std::norm(tr.C));
    }
    return s;
}

double JointState::excitation() const {
    double s = 0.0;
    for (int n = 0; n <= n_max(); ++n) {
        const auto& tr = triples[static_cast<size_t>(n)];
        // a^dag a contributes n under A and n+1 under B/C; sigma_11
        // contributes |A|^2.
        s += field.prob(n) * ((n + 1) * std::norm(tr.A) +
                              (n + 1) * (std::norm(tr.B) + std::norm(tr.C)));
    }
    return s;
}

SystemEvolution::SystemEvolution(FieldState field, ModelParams params,
                                 NonlinearityFn f)
    : field_(std::move(field)), params_(std::move(params)) {
    params_.validate();
    if (field_.q.empty())
        throw std::invalid_argument("field state must have at least one level");
    const int n_max = field_.n_max();
    sectors_.reserve(static_cast<size_t>(n_max) + 1);
    gammas_.reserve(static_cast<size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        sectors_.emplace_back(n, params_, f);
        if (sectors_.back().nudged()) nudged_.push_back(n);
        gammas_.push_back({params_.omega1 + n * params_.Omega,
                           params_.omega2 + (n + 1) * params_.Omega,
                           params_.omega3 + (n + 1) * params_.Omega});
    }
}

JointState SystemEvolution::at(double t) const {
    JointState s;
    s.t = t;
    s.params = params_;
    s.field = field_;
    s.gammas = gammas_;
    s.triples.resize(sectors_.size());
    for (size_t n = 0; n < sectors_.size(); ++n) s.triples[n] = sectors_[n].at(t);
    return s;
}

JointState evolve_state(const FieldState& field, const ModelParams& p,
                        const NonlinearityFn& f, double t) {
    return SystemEvolution(field, p, f).at(t);
}

std::array<std::vector<cplx>, 3> level_vectors(const JointState& s,
                                               bool with_phases) {
    const size_t dim = s.field.q.size() + 1;  // photons 0..n_max+1
    std::array<std::vector<cplx>, 3> c;
    for (auto& v : c) v.assign(dim, cplx{});
    for (int n = 0; n <= s.n_max(); ++n) {
        const size_t un = static_cast<size_t>(n);
        const cplx qn = s.field.q[un];
        const auto& tr = s.triples[un];
        const auto& g = s.gammas[un];
        const cplx p1 = with_phases ? std::polar(1.0, -g[0] * s.t) : cplx{1.0};
        const cplx p2 = with_phases ? std::polar(1.0, -g[1] * s.t) : cplx{1.0};
        const cplx p3 = with_phases ? std::polar(1.0, -g[2] * s.t) : cplx{1.0};
        c[0][un] += qn * tr.A * p1;
        c[1][un + 1] += qn * tr.B * p2;
        c[2][un + 1] += qn * tr.C * p3;
    }
    return c;
}

}  // namespace ljcm
