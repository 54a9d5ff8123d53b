// SPDX-License-Identifier: Apache-2.0
//
// Stationary Gaussian fading synthesis and the channel law
// Y_k = sqrt(SNR/n_t) H_k x_k + Z_k. Fading streams are generated by spectral
// sampling: independent CN(0,1) draws on a fine frequency grid, weighted by
// sqrt(f_H(lambda) dlambda) and inverse-transformed (exactly bandlimited,
// O(G log G)). Each (r,t) entry is an independent stream with a seed derived
// from (master seed, r, t), so results do not depend on execution order.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pace/frame.hpp"
#include "pace/rng.hpp"
#include "pace/spectrum.hpp"

namespace pace {

struct ChannelParams {
    int n_tx = 1;
    int n_rx = 1;
    double snr = 1.0; // linear
};

class FadingProcess {
  public:
    // Generates length + 2*margin samples per stream and keeps the middle
    // `length`; the grid holds the smallest power of two >= oversample*total.
    FadingProcess(const Spectrum& psd, int length, int oversample = 64, int margin = 0);
    ~FadingProcess();
    FadingProcess(const FadingProcess&) = delete;
    FadingProcess& operator=(const FadingProcess&) = delete;

    struct Workspace {
        std::vector<cplx> freq, time;
    };
    Workspace make_workspace() const;

    void sample(Rng& rng, std::span<cplx> out, Workspace& ws) const;
    void sample(Rng& rng, std::span<cplx> out) const;

    int length() const { return length_; }
    int grid_size() const { return grid_; }

  private:
    int length_, margin_, grid_;
    std::vector<int> band_index_;     // grid bins with nonzero density
    std::vector<double> band_weight_; // sqrt(f(lambda_g) / (G * S))
    void* plan_ = nullptr;            // fftw_plan
};

// Fading trace in k-major layout: h[k*(n_rx*n_tx) + r*n_tx + t].
std::vector<cplx> sample_fading(const Spectrum& psd, int n_rx, int n_tx, int length,
                                std::uint64_t seed, int oversample = 64, int margin = 512);

struct Trace {
    int n_rx = 0, n_tx = 0, length = 0;
    double snr = 0.0;
    std::uint64_t seed = 0;
    std::vector<cplx> h; // [k][r][t]
    std::vector<cplx> x; // [k][t]
    std::vector<cplx> z; // [k][r]
    std::vector<cplx> y; // [k][r]
};

// Exact affine law; silent slots must carry zero inputs.
std::vector<cplx> apply_channel(const ChannelParams& params, std::span<const cplx> h,
                                std::span<const cplx> x, std::span<const cplx> z);

// Pilot embedding: unit vector p_t at each pilot slot, zeros on silent slots.
// Data slots take codeword symbols in schedule order, or i.i.d. CN(0,1) draws
// when `codeword` is empty.
std::vector<cplx> build_inputs(const FrameSchedule& schedule, int n_tx,
                               std::span<const cplx> codeword, Rng& rng);

Trace simulate_trace(const Spectrum& psd, const ChannelParams& params,
                     const FrameSchedule& schedule, std::span<const cplx> codeword,
                     std::uint64_t seed, int oversample = 64);

void write_trace(const std::string& path, const Trace& trace);
Trace read_trace(const std::string& path);

} // namespace pace
