// SPDX-License-Identifier: Apache-2.0
//
// Equivalence tests between the scalar reference kernels and whatever
// backend the runtime dispatcher selected.

#include <doctest.h>

#include <vector>

#include "pace/kernels.hpp"
#include "pace/rng.hpp"

using namespace pace;

namespace {

std::vector<cplx> random_vec(Rng& rng, std::size_t n) {
    std::vector<cplx> v(n);
    rng.fill_cgauss(v);
    return v;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("dispatcher reports a valid backend") {
    const std::string name = kern::active_name();
    CHECK((name == "scalar" || name == "avx2"));
    if (kern::cpu_has_avx2()) CHECK(name == "avx2");
    CHECK(kern::select("scalar"));
    CHECK(std::string(kern::active_name()) == "scalar");
    CHECK(kern::select("auto"));
    CHECK(!kern::select("sse999"));
}

TEST_CASE("scalar and active backends agree on random inputs") {
    const auto& ref = kern::scalar();
    const auto& act = kern::active();
    Rng rng(0x4b31u);
    for (std::size_t n : {0u, 1u, 2u, 3u, 5u, 8u, 63u, 64u, 1001u}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        auto c = random_vec(rng, n);
        const cplx s{0.7, -1.3};

        const cplx d_ref = ref.cdotu(a.data(), b.data(), n);
        const cplx d_act = act.cdotu(a.data(), b.data(), n);
        CHECK(std::abs(d_ref - d_act) <= 1e-12 * (1.0 + std::abs(d_ref)));

        const double s2_ref = ref.sum_abs2(a.data(), n);
        const double s2_act = act.sum_abs2(a.data(), n);
        CHECK(s2_act == doctest::Approx(s2_ref).epsilon(1e-12));

        const double m_ref = ref.dist2(a.data(), b.data(), s, n);
        const double m_act = act.dist2(a.data(), b.data(), s, n);
        CHECK(m_act == doctest::Approx(m_ref).epsilon(1e-12));

        const double p_ref = ref.dist2_mul(a.data(), b.data(), c.data(), n);
        const double p_act = act.dist2_mul(a.data(), b.data(), c.data(), n);
        CHECK(p_act == doctest::Approx(p_ref).epsilon(1e-12));

        std::vector<double> w(n);
        for (auto& x : w) x = rng.gauss();
        std::vector<cplx> out_ref(n), out_act(n);
        ref.shape_mul(out_ref.data(), w.data(), a.data(), n);
        act.shape_mul(out_act.data(), w.data(), a.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(out_ref[i] == out_act[i]);
    }
}

TEST_CASE("kernel arithmetic matches direct formulas") {
    const auto& k = kern::active();
    const std::vector<cplx> a{{1, 2}, {3, -1}};
    const std::vector<cplx> b{{0, 1}, {2, 2}};
    const cplx want = a[0] * b[0] + a[1] * b[1];
    CHECK(std::abs(k.cdotu(a.data(), b.data(), 2) - want) < 1e-15);
    CHECK(k.sum_abs2(a.data(), 2) == doctest::Approx(1 + 4 + 9 + 1));
    const cplx s{2.0, 0.0};
    double d = std::norm(a[0] - s * b[0]) + std::norm(a[1] - s * b[1]);
    CHECK(k.dist2(a.data(), b.data(), s, 2) == doctest::Approx(d));
}

} // TEST_SUITE
