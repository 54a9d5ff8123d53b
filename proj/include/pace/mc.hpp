// SPDX-License-Identifier: Apache-2.0
//
// Batched Monte Carlo runner. Trials are grouped into fixed-size batches,
// each batch owns an RNG stream derived from (seed, batch index), and batch
// results are reduced with a pairwise tree in batch order. Results are
// therefore identical for any thread count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pace/rng.hpp"

namespace pace::mc {

inline constexpr long kBatchSize = 1024;

// Pairwise (tree) sum over values in index order.
double pairwise_sum(std::span<const double> v);

struct Estimate {
    std::vector<double> mean;
    std::vector<double> se;
    long trials = 0;
};

namespace detail {
void run_batches(long n_batches, int threads, const std::function<void(long)>& body);
} // namespace detail

// per_trial(rng, out): writes `dim` doubles for one trial. Means and standard
// errors are estimated per component.
template <class Fn>
Estimate run(long trials, std::uint64_t seed, int threads, int dim, Fn&& per_trial) {
    if (trials < 1) throw std::invalid_argument("mc::run: trials must be >= 1");
    if (dim < 1) throw std::invalid_argument("mc::run: dim must be >= 1");
    const long n_batches = (trials + kBatchSize - 1) / kBatchSize;
    std::vector<std::vector<double>> sums(n_batches), sqs(n_batches);

    detail::run_batches(n_batches, threads, [&](long b) {
        const long lo = b * kBatchSize;
        const long hi = std::min(trials, lo + kBatchSize);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b), 0x6d63u));
        std::vector<double> sample(dim), sum(dim, 0.0), sq(dim, 0.0);
        for (long i = lo; i < hi; ++i) {
            per_trial(rng, sample.data());
            for (int d = 0; d < dim; ++d) {
                sum[d] += sample[d];
                sq[d] += sample[d] * sample[d];
            }
        }
        sums[b] = std::move(sum);
        sqs[b] = std::move(sq);
    });

    Estimate est;
    est.trials = trials;
    est.mean.resize(dim);
    est.se.resize(dim);
    std::vector<double> col(n_batches);
    for (int d = 0; d < dim; ++d) {
        for (long b = 0; b < n_batches; ++b) col[b] = sums[b][d];
        const double s1 = pairwise_sum(col);
        for (long b = 0; b < n_batches; ++b) col[b] = sqs[b][d];
        const double s2 = pairwise_sum(col);
        const double mean = s1 / trials;
        double var = s2 / trials - mean * mean;
        if (var < 0.0) var = 0.0;
        est.mean[d] = mean;
        est.se[d] = trials > 1 ? std::sqrt(var / trials) : 0.0;
    }
    return est;
}

} // namespace pace::mc
