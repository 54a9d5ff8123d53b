// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "pace/quadrature.hpp"
#include "pace/spectrum.hpp"

using namespace pace;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent closed-form oracle for the rectangular shape:
// c(m) = sin(2 pi m lambda_D) / (2 pi m lambda_D).
double rect_autocov(int m, double bw) {
    if (m == 0) return 1.0;
    const double x = 2.0 * kPi * m * bw;
    return std::sin(x) / x;
}

// Raised-cosine impulse-response oracle with 1/T = 2 lambda_D / (1 + beta):
// c(m) = sinc(m/T) cos(pi beta m/T) / (1 - (2 beta m/T)^2).
double rc_autocov(int m, double bw, double beta) {
    if (m == 0) return 1.0;
    const double inv_t = 2.0 * bw / (1.0 + beta);
    const double u = m * inv_t;
    const double sinc = std::sin(kPi * u) / (kPi * u);
    const double den = 1.0 - 4.0 * beta * beta * u * u;
    return sinc * std::cos(kPi * beta * u) / den;
}

} // namespace

TEST_SUITE("spectrum") {

TEST_CASE("unit total power for every shape") {
    for (const Spectrum& s :
         {Spectrum::rectangular(0.1), Spectrum::rectangular(0.37), Spectrum::raised_cosine(0.2, 0.5),
          Spectrum::raised_cosine(0.15, 0.0), Spectrum::raised_cosine(0.12, 1.0)}) {
        CHECK(s.autocovariance(0).real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.autocovariance(0).imag() == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("rectangular autocovariance matches the sinc oracle") {
    const Spectrum s = Spectrum::rectangular(0.1);
    for (int m = 0; m <= 25; ++m)
        CHECK(s.autocovariance(m).real() == doctest::Approx(rect_autocov(m, 0.1)).epsilon(0).scale(1).epsilon(1e-9));
    // sinc zero at the half-period: lambda_D = 0.25, m = 2.
    CHECK(std::abs(Spectrum::rectangular(0.25).autocovariance(2)) < 1e-12);
    // spelled-out value from the sinc closed form
    CHECK(s.autocovariance(1).real() ==
          doctest::Approx(std::sin(0.2 * kPi) / (0.2 * kPi)).epsilon(1e-9));
}

TEST_CASE("raised-cosine autocovariance matches the impulse-response oracle") {
    const double bw = 0.15, beta = 0.3;
    const Spectrum s = Spectrum::raised_cosine(bw, beta);
    for (int m = 1; m <= 12; ++m)
        CHECK(s.autocovariance(m).real() == doctest::Approx(rc_autocov(m, bw, beta)).epsilon(1e-8));
}

TEST_CASE("hermitian symmetry and boundedness") {
    const Spectrum s = Spectrum::raised_cosine(0.2, 0.4);
    for (int m = 1; m <= 40; ++m) {
        const cplx c = s.autocovariance(m);
        CHECK(s.autocovariance(-m) == std::conj(c));
        CHECK(std::abs(c) <= 1.0 + 1e-12);
    }
}

TEST_CASE("density is bandlimited, non-negative and positive in-band") {
    for (const Spectrum& s : {Spectrum::rectangular(0.1), Spectrum::raised_cosine(0.2, 0.6)}) {
        const double bw = s.bandwidth();
        for (int i = 0; i <= 400; ++i) {
            const double lam = -0.5 + i / 400.0;
            const double f = s.density(lam);
            CHECK(f >= 0.0);
            if (std::abs(lam) > bw + 1e-12) CHECK(f == 0.0);
            if (std::abs(lam) < bw - 1e-12) CHECK(f > 0.0);
        }
    }
    // rectangular edge takes the half-value
    const Spectrum r = Spectrum::rectangular(0.1);
    CHECK(r.density(0.1) == doctest::Approx(2.5));
    CHECK(r.density(-0.1) == doctest::Approx(2.5));
}

TEST_CASE("folded spectrum basics") {
    const Spectrum s = Spectrum::rectangular(0.1);
    // L = 1: the folding sum has a single term.
    for (double lam : {-0.4, -0.11, 0.0, 0.07, 0.32})
        CHECK(std::abs(s.folded(1, 0, lam) - cplx{s.density(lam), 0.0}) < 1e-15);
    // Alias-free identity at the origin: f_{H_L,0}(0) = f_H(0)/L = 1.
    CHECK(s.folded_base(5, 0.0) == doctest::Approx(1.0));
    // Magnitude identity under the Nyquist condition, checked at lambda=0.2.
    CHECK(std::abs(s.folded(5, 3, 0.2)) == doctest::Approx(s.folded_base(5, 0.2)).epsilon(1e-12));
    CHECK_THROWS_AS((void)s.folded(5, 5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)s.folded(5, -1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)s.folded(5, 0, 0.7), std::invalid_argument);
    CHECK_THROWS_AS((void)s.folded(0, 0, 0.0), std::invalid_argument);
}

TEST_CASE("alias-free magnitude identity across the whole period") {
    // Sampled off the measure-zero collision set: at the critical L the two
    // half-valued band-edge copies meet exactly at lambda = +-1/2 and their
    // phases need not align there.
    for (const Spectrum& s : {Spectrum::rectangular(0.1), Spectrum::raised_cosine(0.09, 0.5)}) {
        const int l_max = static_cast<int>(std::floor(1.0 / (2.0 * s.bandwidth()) + 1e-9));
        for (int L : {2, l_max}) {
            for (int ell = 0; ell < L; ++ell) {
                for (int i = 0; i < 160; ++i) {
                    const double lam = -0.5 + (i + 0.431) / 160.0;
                    const double diff = std::abs(s.folded(L, ell, lam)) - s.folded_base(L, lam);
                    CHECK(std::abs(diff) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("folded base integrates to one") {
    const Spectrum s = Spectrum::rectangular(0.1);
    for (int L : {2, 3, 5}) {
        const auto pts = s.folded_breakpoints(L);
        const double integral = quad::integrate(
            [&](double x, double toward) { return s.folded_base_limit(L, x, toward); },
            std::span<const double>(pts), s.grid_points());
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("tabulated rectangular matches the closed form to 1e-6") {
    const double bw = 0.1;
    const Spectrum rect = Spectrum::rectangular(bw);
    // Bracket the support with one zero node on each side so the linear
    // interpolant straddles the jump symmetrically.
    const int n = 4097;
    const double h = 2.0 * bw / (n - 1);
    std::vector<double> lam, val;
    for (int i = -1; i <= n; ++i) {
        lam.push_back(-bw + h * i);
        val.push_back(rect.density(lam.back()));
    }
    const Spectrum tab = Spectrum::tabulated(lam, val);
    for (int m = 0; m <= 5; ++m)
        CHECK(tab.autocovariance(m).real() ==
              doctest::Approx(rect_autocov(m, bw)).epsilon(0).scale(1).epsilon(1e-6));
}

TEST_CASE("tabulated load renormalizes and validates") {
    std::vector<double> lam{-0.2, -0.1, 0.0, 0.1, 0.2};
    std::vector<double> val{0.0, 3.0, 6.0, 3.0, 0.0}; // integral 0.9, rescaled on load
    const Spectrum s = Spectrum::tabulated(lam, val);
    CHECK(s.autocovariance(0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.bandwidth() == doctest::Approx(0.2));
    CHECK_THROWS_AS(Spectrum::tabulated({0.0, 0.1}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::tabulated({0.1, 0.0, 0.2}, {1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::tabulated({-0.1, 0.0, 0.6}, {1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum::tabulated({-0.1, 0.0, 0.1}, {1.0, -1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("csv round trip") {
    const char* path = "pace_test_psd.csv";
    {
        std::FILE* f = std::fopen(path, "w");
        REQUIRE(f);
        std::fputs("# lambda, density\n", f);
        for (int i = 0; i <= 64; ++i) {
            const double lam = -0.12 + 0.24 * i / 64.0;
            std::fprintf(f, "%.17g,%.17g\n", lam, 1.0 - std::abs(lam) / 0.12);
        }
        std::fclose(f);
    }
    const Spectrum s = Spectrum::load_csv(path);
    CHECK(s.shape() == Spectrum::Shape::tabulated);
    CHECK(s.bandwidth() == doctest::Approx(0.12));
    CHECK(s.autocovariance(0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(Spectrum::load_csv("no_such_file.csv"), std::invalid_argument);
    std::remove(path);
}

} // TEST_SUITE
