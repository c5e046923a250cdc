#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ljcm/model.hpp"

using namespace ljcm;

namespace {

// Independent tail oracle: Poisson pmf from lgamma instead of the production
// recurrence, accumulated in extended precision.
int tail_cut(double mean, double epsilon) {
    long double cum = 0.0L;
    for (int n = 0;; ++n) {
        const long double logp = -static_cast<long double>(mean) +
                                 n * std::log(static_cast<long double>(mean)) -
                                 std::lgamma(static_cast<long double>(n) + 1.0L);
        cum += std::exp(logp);
        if (1.0L - cum < static_cast<long double>(epsilon)) return n;
    }
}

double poisson_pmf(int n, double mean) {
    return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

}  // namespace

TEST_CASE("detunings subtract the upper level and add the mode frequency") {
    const auto [d2, d3] = detunings(5.0, 1.0, 2.0, 1.0);
    CHECK(d2 == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(d3 == doctest::Approx(-2.0).epsilon(1e-15));

    const auto [r2, r3] = detunings(1.0, 0.0, 0.0, 1.0);
    CHECK(r2 == 0.0);
    CHECK(r3 == 0.0);
}

TEST_CASE("scaled parameterisation realises the requested ratios") {
    const ModelParams p = ModelParams::scaled(2.0, 0.4, 7.0, 15.0);
    CHECK(p.lambda1 == 2.0);
    CHECK(p.lambda2 == 2.0);
    CHECK(p.chi == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(p.delta2 == doctest::Approx(14.0).epsilon(1e-15));
    CHECK(p.delta3 == doctest::Approx(30.0).epsilon(1e-15));
    CHECK(p.omega1 == 2.0);
    CHECK(p.Omega == 2.0);

    const ModelParams res = ModelParams::scaled(1.0, 0.0, 0.0, 0.0);
    CHECK(res.delta2 == 0.0);
    CHECK(res.delta3 == 0.0);
    CHECK(res.chi == 0.0);
}

TEST_CASE("parameter validation rejects unphysical inputs") {
    CHECK_THROWS_AS(ModelParams::make(1, 0, 0, 1, 0.0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams::make(1, 0, 0, 1, 1, -2.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams::make(NAN, 0, 0, 1, 1, 1, 0), std::invalid_argument);

    ModelParams p = ModelParams::scaled(1.0, 0.0, 7.0, 15.0);
    CHECK_NOTHROW(p.validate());
    p.delta2 = 0.0;  // now inconsistent with the level energies
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("coupling profiles") {
    const NonlinearityFn c = NonlinearityFn::constant();
    CHECK(c(1) == 1.0);
    CHECK(c(7) == 1.0);

    const NonlinearityFn is = NonlinearityFn::inverse_sqrt();
    CHECK(is(1) == 1.0);
    CHECK(is(4) == doctest::Approx(0.5).epsilon(1e-15));

    // e_n = n f^2(n), so e_n = n is the constant profile in disguise.
    std::vector<double> e;
    for (int n = 1; n <= 10; ++n) e.push_back(static_cast<double>(n));
    const NonlinearityFn custom = NonlinearityFn::from_excitations(e);
    CHECK(custom(7) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(custom(3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(custom.table_size() == 10);

    const NonlinearityFn zero = NonlinearityFn::from_excitations({0.0, 2.0});
    CHECK(zero(1) == 0.0);  // zero entries decouple the sector, still valid

    for (const NonlinearityFn& f : {c, is, custom}) {
        CHECK_THROWS_AS(f(0), std::domain_error);
        CHECK_THROWS_AS(f(-2), std::domain_error);
    }
    CHECK_THROWS_AS(custom(11), std::out_of_range);
    CHECK_THROWS_AS(NonlinearityFn::from_excitations({}), std::invalid_argument);
    CHECK_THROWS_AS(NonlinearityFn::from_excitations({1.0, -0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(NonlinearityFn::from_excitations({1.0, NAN}),
                    std::invalid_argument);
}

TEST_CASE("truncation policy validation") {
    CHECK_NOTHROW(TruncationPolicy{}.validate());
    CHECK_THROWS_AS((TruncationPolicy{0.0, 8}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TruncationPolicy{1.0, 8}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TruncationPolicy{-1e-9, 8}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TruncationPolicy{1e-12, 5}.validate()), std::invalid_argument);
    CHECK_NOTHROW((TruncationPolicy{1e-12, 6}.validate()));
}

TEST_CASE("choose_truncation matches an independent tail computation") {
    for (double mean : {0.5, 1.0, 4.0, 10.0, 25.0, 100.0})
        for (double eps : {1e-6, 1e-12}) {
            const TruncationPolicy pol{eps, 8};
            CHECK(choose_truncation(mean, pol) == tail_cut(mean, eps) + 8);
        }

    // Reference figure configuration, frozen: tail cut 39 plus margin 8.
    CHECK(choose_truncation(10.0, TruncationPolicy{1e-12, 8}) == 47);

    CHECK(choose_truncation(0.0, TruncationPolicy{1e-12, 8}) == 8);

    // Tighter epsilon can only deepen the cut.
    CHECK(choose_truncation(10.0, TruncationPolicy{1e-12, 8}) >=
          choose_truncation(10.0, TruncationPolicy{1e-6, 8}));

    CHECK_THROWS_AS(choose_truncation(-1.0, TruncationPolicy{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(choose_truncation(NAN, TruncationPolicy{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(choose_truncation(2e4, TruncationPolicy{}),
                    std::invalid_argument);
}

TEST_CASE("coherent field amplitudes") {
    const FieldState fs = coherent_field(std::sqrt(10.0));
    CHECK(fs.n_max() == 47);

    // P_10 for |alpha|^2 = 10, frozen reference value.
    CHECK(fs.prob(10) ==
          doctest::Approx(0.125110035721133299).epsilon(1e-13));

    CHECK(fs.norm_sq() >= 1.0 - 1e-12);
    CHECK(fs.norm_sq() <= 1.0 + 1e-15);
    CHECK(fs.mean_photons() == doctest::Approx(10.0).epsilon(1e-10));

    // Second and third factorial-free moments of the Poisson weights.
    double n2 = 0.0, n3 = 0.0;
    for (int n = 0; n <= fs.n_max(); ++n) {
        n2 += double(n) * n * fs.prob(n);
        n3 += double(n) * n * n * fs.prob(n);
    }
    CHECK(n2 == doctest::Approx(110.0).epsilon(1e-9));
    CHECK(n3 == doctest::Approx(1310.0).epsilon(1e-9));

    // Amplitudes agree with the direct pmf.
    for (int n : {0, 5, 10, 25, 40})
        CHECK(fs.prob(n) == doctest::Approx(poisson_pmf(n, 10.0)).epsilon(1e-11));
}

TEST_CASE("coherent field phase convention q_n ~ alpha^n") {
    const double phi = 0.7;
    const cplx alpha = std::polar(std::sqrt(10.0), phi);
    const FieldState fs = coherent_field(alpha);
    const FieldState ref = coherent_field(std::sqrt(10.0));
    for (int n = 0; n <= fs.n_max(); ++n) {
        const cplx expected = ref.q[static_cast<size_t>(n)] *
                              std::polar(1.0, n * phi);
        CHECK(std::abs(fs.q[static_cast<size_t>(n)] - expected) < 1e-14);
    }
}

TEST_CASE("vacuum field") {
    const FieldState vac = coherent_field(0.0);
    CHECK(vac.n_max() == 8);  // margin only
    CHECK(vac.q[0] == cplx{1.0, 0.0});
    CHECK(vac.norm_sq() == 1.0);
    CHECK(vac.mean_photons() == 0.0);
}

TEST_CASE("looser policies shrink the basis") {
    const FieldState tight = coherent_field(2.0, TruncationPolicy{1e-12, 8});
    const FieldState loose = coherent_field(2.0, TruncationPolicy{1e-6, 6});
    CHECK(loose.n_max() < tight.n_max());
    CHECK(loose.norm_sq() >= 1.0 - 1e-6);
}
