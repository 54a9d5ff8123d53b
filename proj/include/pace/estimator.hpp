// SPDX-License-Identifier: Apache-2.0
//
// Finite-window LMMSE interpolation of fading coefficients from pilot-slot
// observations, plus the analytic T -> infinity error variances from the
// folded-spectrum integrals.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pace/fading.hpp"
#include "pace/frame.hpp"
#include "pace/spectrum.hpp"

namespace pace {

// Per-offset coefficient vectors a(ell, t) over the pilot indices
// k' in [k - TL, k + TL] that excite antenna t (other antennas' pilot slots
// are independent of column t and provably get coefficient zero). Normal
// equations: (psi C + I) a~ = r with psi = snr/n_tx,
// C(i,j) = autocov(lag_i - lag_j), r_i = sqrt(psi) autocov(-lag_i).
class InterpolatorBank {
  public:
    InterpolatorBank(const Spectrum& psd, int period, int n_tx, int window, double snr);

    int period() const { return period_; }
    int n_tx() const { return n_tx_; }
    int window() const { return window_; }
    double snr() const { return snr_; }

    // Absolute within-period data offsets {n_tx, ..., period-1}.
    const std::vector<int>& offsets() const { return offsets_; }

    const std::vector<int>& lags(int offset, int tx) const;
    std::span<const cplx> coeff(int offset, int tx) const;

    double error_variance(int offset, int tx) const;    // sigma^2_{e,T}(ell, t)
    double error_variance(int offset) const;            // max over tx
    double sigma2_star() const;                         // max over (offset, tx)
    // Relative residual of the normal equations at build time.
    double normal_residual(int offset, int tx) const;

    // Estimate H_k(r,t) from the pilot-slot outputs of a frame; k must be a
    // data index of the schedule. y is laid out [k][r].
    cplx interpolate(std::span<const cplx> y, int n_rx, const FrameSchedule& schedule, int k,
                     int r, int t) const;
    cplx interpolate(const Trace& trace, const FrameSchedule& schedule, int k, int r,
                     int t) const;

  private:
    struct Entry {
        std::vector<int> lags;
        std::vector<cplx> coeff;
        double variance = 1.0;
        double residual = 0.0;
    };
    const Entry& entry(int offset, int tx) const;

    int period_, n_tx_, window_;
    double snr_;
    std::vector<int> offsets_;
    std::vector<Entry> entries_; // [(offset - n_tx) * n_tx + tx]
};

// sigma^2_e(ell) = 1 - int SNR |f_{H_L,ell}|^2 / (SNR f_{H_L,0} + 1) dlambda.
// Valid in both the aliased and alias-free regimes; ell is the lag residue
// of the data instant relative to the pilot comb.
double asymptotic_error_variance(const Spectrum& psd, int L, double snr, int ell);

struct AsymptoticErrorProfile {
    AsymptoticErrorProfile(const Spectrum& psd, int L, double snr, int n_tx);
    std::vector<int> offsets;    // absolute data offsets
    std::vector<double> sigma2;  // per offset, max over tx residues
    double sigma2_star = 0.0;    // max over offsets
    double sigma2_hat = 0.0;     // 1 - sigma2_star
};

} // namespace pace
