// SPDX-License-Identifier: Apache-2.0
//
// Random Gaussian codebooks and the mismatched nearest-neighbour decoder
// D(m) = sum_{k in D} ||y_k - sqrt(SNR/n_t) Hhat_k x_k(m)||^2, plus the
// end-to-end frame-error simulation around it.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pace/estimator.hpp"
#include "pace/fading.hpp"
#include "pace/frame.hpp"
#include "pace/spectrum.hpp"

namespace pace {

struct Codebook {
    int n_messages = 0;
    int length = 0; // codeword length in data vectors
    int n_tx = 0;
    std::uint64_t seed = 0;
    std::vector<cplx> symbols; // [m][n][t], i.i.d. CN(0,1)

    std::span<const cplx> codeword(int m) const {
        return {symbols.data() + static_cast<std::size_t>(m) * length * n_tx,
                static_cast<std::size_t>(length) * n_tx};
    }
};

inline constexpr std::size_t kDefaultCodebookCap = std::size_t{1} << 30; // bytes

Codebook generate_codebook(int n_messages, int length, int n_tx, std::uint64_t seed,
                           std::size_t memory_cap_bytes = kDefaultCodebookCap);

// Desk-scale rate-to-size mapping: round(e^{N R}) capped at 2^16.
int messages_for_rate(int length, double rate_nats);

// y: [n][r] over the data slots, h_hat: [n][r][t], x: [n][t].
double nn_metric(std::span<const cplx> y, std::span<const cplx> h_hat, std::span<const cplx> x,
                 double snr, int n_rx, int n_tx);

struct DecodeResult {
    int message = -1;
    std::vector<double> metrics; // filled when keep_metrics is set
};

DecodeResult decode(std::span<const cplx> y, std::span<const cplx> h_hat, const Codebook& cb,
                    double snr, int n_rx, bool keep_metrics = false);

// Reusable per-config machinery: fading synthesis grid, interpolator bank.
class LinkSimulator {
  public:
    LinkSimulator(const Spectrum& psd, const ChannelParams& params, const FrameSchedule& schedule,
                  int oversample = 64);

    Trace run(std::uint64_t trial_seed, std::span<const cplx> codeword) const;
    const InterpolatorBank& bank() const { return bank_; }
    const FrameSchedule& schedule() const { return schedule_; }
    const ChannelParams& params() const { return params_; }

    // Gathers y and interpolated estimates over the data slots of a trace.
    void data_view(const Trace& trace, std::vector<cplx>& y_data,
                   std::vector<cplx>& h_hat_data) const;

  private:
    ChannelParams params_;
    FrameSchedule schedule_;
    FadingProcess process_;
    InterpolatorBank bank_;
};

struct LinkStats {
    long trials = 0;
    long frame_errors = 0;
    double fer = 0.0;
    double mean_metric_correct = 0.0;
    double mean_metric_incorrect = 0.0;
    std::string to_json() const;
};

LinkStats simulate_link(const Spectrum& psd, const ChannelParams& params,
                        const FrameSchedule& schedule, const Codebook& cb, long trials,
                        std::uint64_t seed, int threads = 1, int oversample = 64);

} // namespace pace
