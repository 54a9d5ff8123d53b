// SPDX-License-Identifier: Apache-2.0
//
// Generalized-mutual-information lower bounds for nearest-neighbour decoding
// with pilot-aided LMMSE estimates: the Gartner-Ellis form
// sup_{theta <= 0} (theta B - kappa(theta)), the fixed-theta finite-T bound,
// its T -> infinity limit, and the high-SNR pre-log machinery. Rates are in
// nats throughout.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pace/estimator.hpp"
#include "pace/spectrum.hpp"

namespace pace {

// --------------------------------------------------------------------------
// Reference pre-log constants.

struct PrelogBound {
    int l_star = 0;          // largest integer <= 1/(2 lambda_D)
    double bound = 0.0;      // min(nt,nr) (1 - min(nt,nr)/L*)
    double best_antennas = 0.0; // continuous optimizer L*/2
    double best_bound = 0.0;    // resulting maximum L*/4
};
PrelogBound prelog_achievable(int n_tx, int n_rx, double bandwidth);

inline double prelog_miso(double bandwidth) { return 1.0 - 2.0 * bandwidth; }
inline double prelog_mimo_lower_bound(int n_tx, int n_rx, double bandwidth) {
    const int m = n_tx < n_rx ? n_tx : n_rx;
    return m * (1.0 - m * 2.0 * bandwidth);
}

// --------------------------------------------------------------------------
// Joint sampling of (H, Hhat, Y) at the data slots of one steady-state
// period. Fading values at the pilot/data instants a period actually uses
// are drawn exactly (eigen-factor of the autocovariance matrix); estimates
// share pilot observations across offsets just like a real frame.

class PeriodSampler {
  public:
    PeriodSampler(const Spectrum& psd, const InterpolatorBank& bank, int n_rx);
    ~PeriodSampler();
    PeriodSampler(const PeriodSampler&) = delete;
    PeriodSampler& operator=(const PeriodSampler&) = delete;

    int n_rx() const { return n_rx_; }
    int n_tx() const { return n_tx_; }
    const std::vector<int>& offsets() const;

    struct Draw {
        // Per offset index o: h/h_hat are [o][r][t], y is [o][r], x is [o][t].
        std::vector<cplx> h, h_hat, y, x;
    };
    void draw(Rng& rng, Draw& out) const;

  private:
    struct Impl;
    Impl* impl_;
    int n_rx_, n_tx_;
};

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
    long trials = 0;
};

// --------------------------------------------------------------------------
// GMI pieces.

// B(SNR) = (1/L) sum_ell E[n_r + sqrt(SNR/n_t) ||E_ell||_F^2], evaluated in
// closed form with E||E||_F^2 = n_r sum_t sigma^2_{e,T}(ell, t).
double gmi_b_constant(double snr, const InterpolatorBank& bank, int n_rx);
// Primitive form: sigma2_sum[oi] = sum_t sigma^2_{e,T}(offset_oi, t).
double gmi_b_constant(double snr, int period, int n_tx, int n_rx,
                      std::span<const double> sigma2_sum);

struct KappaEstimate {
    double kappa = 0.0, se = 0.0;
    double quad_term = 0.0, quad_se = 0.0;   // (1/L) sum_ell E[theta Y' M^-1 Y], <= 0
    double logdet_term = 0.0, logdet_se = 0.0;
    long trials = 0;
};
KappaEstimate kappa_mc(double theta, double snr, const Spectrum& psd,
                       const InterpolatorBank& bank, int n_rx, long trials, std::uint64_t seed,
                       int threads = 1);

// Fixed-theta finite-T bound with the worst-offset error variance in the
// denominator:
// (1/L) sum_ell E[logdet(I + SNR Hhat Hhat' / (nt nr (1 + SNR s2*)))] - (L-nt)/L.
McEstimate gmi_lower_bound_finite_T(double snr, const Spectrum& psd,
                                    const InterpolatorBank& bank, int n_rx, long trials,
                                    std::uint64_t seed, int threads = 1);

struct AsymptoticBound {
    McEstimate logdet_form;      // MC over Hbar with entries CN(0, 1 - s2*)
    double closed_form = 0.0;    // fully expanded with E[logdet Hbar Hbar']
    double sigma2_star = 0.0;
    double e_logdet = 0.0;       // analytic E[logdet Hbar Hbar']
    McEstimate logdet_hh;        // MC estimate of E[logdet Hbar Hbar'] (cross-check)
};
// Requires L <= 1/(2 lambda_D); antenna counts reduce to n = min(n_tx, n_rx).
AsymptoticBound gmi_lower_bound_asymptotic(double snr, int L, int n_tx, int n_rx,
                                           const Spectrum& psd, long trials,
                                           std::uint64_t seed, int threads = 1);

// Least-squares slope of bound vs ln(snr); needs >= 3 points spanning >= 2
// decades.
struct PrelogFit {
    double slope = 0.0;
    double intercept = 0.0;
};
PrelogFit fit_prelog(std::span<const double> snr, std::span<const double> bound);

struct ThetaSweep {
    double theta_ref = 0.0; // -1/(n_r + (SNR/n_t) n_t n_r sigma^2_{e*,T})
    double best_theta = 0.0;
    double best_bound = 0.0;
    std::vector<double> thetas;
    std::vector<double> bounds; // theta B - kappa(theta), common random numbers
    std::vector<double> ses;
    long trials = 0;
};
ThetaSweep gmi_theta_sweep(double snr, const Spectrum& psd, const InterpolatorBank& bank,
                           int n_rx, long trials, std::uint64_t seed, int threads = 1,
                           int n_points = 25, double decades = 2.0);

// --------------------------------------------------------------------------
// Report over an SNR grid (CSV/JSON emission lives with the CLI).

struct GmiPoint {
    double snr_db = 0.0, snr = 0.0;
    double theta = 0.0;
    double b_constant = 0.0;
    double kappa = 0.0, kappa_se = 0.0;
    double fixed_theta_bound = 0.0;
    bool has_sweep = false;
    double sweep_theta = 0.0, sweep_bound = 0.0;
    double finite_t_bound = 0.0, finite_t_se = 0.0;
    bool has_asymptotic = false;
    double asym_mc = 0.0, asym_mc_se = 0.0, asym_closed = 0.0;
    double sigma2_star_T = 0.0, sigma2_star = 0.0;
};

struct GmiReport {
    int n_tx = 0, n_rx = 0, period = 0, window = 0;
    double bandwidth = 0.0;
    long trials = 0;
    std::uint64_t seed = 0;
    std::vector<GmiPoint> points;
    bool has_fit = false;
    PrelogFit fit;              // on the asymptotic MC bound when present
    double prelog_miso_ref = 0.0, prelog_mimo_ref = 0.0, prelog_scheme = 0.0;
    int l_star = 0;
};

} // namespace pace
