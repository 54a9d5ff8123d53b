// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "pace/mc.hpp"

using namespace pace;

TEST_SUITE("mc") {

TEST_CASE("pairwise sum equals sequential sum of exact values") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 17);
    double seq = 0.0;
    for (double x : v) seq += x;
    CHECK(mc::pairwise_sum(v) == seq); // integer-valued, no rounding at all
}

TEST_CASE("results are identical for any thread count") {
    auto body = [](Rng& rng, double* out) {
        out[0] = rng.gauss();
        out[1] = rng.uniform();
    };
    const auto a = mc::run(5000, 99, 1, 2, body);
    const auto b = mc::run(5000, 99, 4, 2, body);
    const auto c = mc::run(5000, 99, 7, 2, body);
    CHECK(a.mean == b.mean);
    CHECK(b.mean == c.mean);
    CHECK(a.se == c.se);
}

TEST_CASE("uneven trailing batch is handled") {
    const long trials = mc::kBatchSize + 37;
    const auto est = mc::run(trials, 3, 2, 1, [](Rng&, double* out) { out[0] = 1.0; });
    CHECK(est.mean[0] == doctest::Approx(1.0));
    CHECK(est.trials == trials);
}

TEST_CASE("standard errors shrink like 1/sqrt(trials)") {
    auto body = [](Rng& rng, double* out) { out[0] = rng.gauss(); };
    const auto small = mc::run(2000, 5, 2, 1, body);
    const auto large = mc::run(32000, 5, 2, 1, body);
    CHECK(large.se[0] < small.se[0]);
    CHECK(large.se[0] == doctest::Approx(1.0 / std::sqrt(32000.0)).epsilon(0.1));
}

TEST_CASE("worker exceptions propagate") {
    CHECK_THROWS_AS(mc::run(4000, 1, 3, 1,
                            [](Rng&, double*) { throw std::runtime_error("boom"); }),
                    std::runtime_error);
    CHECK_THROWS_AS(mc::run(0, 1, 1, 1, [](Rng&, double*) {}), std::invalid_argument);
}

TEST_CASE("derived stream seeds separate coordinates") {
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
    CHECK(derive_seed(7, 0, 0, 1) != derive_seed(7, 0, 1, 0));
}

} // TEST_SUITE
