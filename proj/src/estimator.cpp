// SPDX-License-Identifier: Apache-2.0

#include "pace/estimator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "pace/kernels.hpp"
#include "pace/quadrature.hpp"

namespace pace {

InterpolatorBank::InterpolatorBank(const Spectrum& psd, int period, int n_tx, int window,
                                   double snr)
    : period_(period), n_tx_(n_tx), window_(window), snr_(snr) {
    if (n_tx < 1 || period <= n_tx)
        throw std::invalid_argument("InterpolatorBank: need 1 <= n_tx < period");
    if (window < 1) throw std::invalid_argument("InterpolatorBank: window T must be >= 1");
    if (!(snr > 0.0)) throw std::invalid_argument("InterpolatorBank: snr must be > 0");

    for (int off = n_tx; off < period; ++off) offsets_.push_back(off);

    // Lag differences between window pilots reach 2*T*L.
    const int max_lag = 2 * window * period + period;
    std::vector<cplx> acov(static_cast<std::size_t>(max_lag) + 1);
    for (int m = 0; m <= max_lag; ++m) acov[m] = psd.autocovariance(m);
    auto c = [&](int m) { return m >= 0 ? acov[m] : std::conj(acov[-m]); };

    const double psi = snr / n_tx;
    entries_.resize(offsets_.size() * static_cast<std::size_t>(n_tx));
    for (std::size_t oi = 0; oi < offsets_.size(); ++oi) {
        const int off = offsets_[oi];
        for (int t = 0; t < n_tx; ++t) {
            Entry& e = entries_[oi * n_tx + t];
            const int span = window * period;
            for (int d = -window - 1; d <= window + 1; ++d) {
                const int lag = d * period + t - off;
                if (std::abs(lag) <= span) e.lags.push_back(lag);
            }
            const int n = static_cast<int>(e.lags.size());
            Eigen::MatrixXcd R(n, n);
            Eigen::VectorXcd v(n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j)
                    R(i, j) = psi * c(e.lags[i] - e.lags[j]) + (i == j ? 1.0 : 0.0);
                v(i) = std::sqrt(psi) * c(-e.lags[i]);
            }
            // Minimize E|H_k - sum_i a_i Y_{k+lag_i}|^2: conj(R) a = v, with
            // R(i,j) = E[Y_i conj(Y_j)] and v_i = E[H conj(Y_i)].
            const Eigen::MatrixXcd Rc = R.conjugate();
            Eigen::LLT<Eigen::MatrixXcd> llt(Rc);
            if (llt.info() != Eigen::Success)
                throw std::runtime_error(
                    "InterpolatorBank: normal-equation matrix not positive definite");
            const Eigen::VectorXcd a = llt.solve(v);
            e.residual = (Rc * a - v).norm() / v.norm();
            double var = 1.0 - (v.adjoint() * a).value().real();
            if (var < -1e-9 || var > 1.0 + 1e-9)
                throw std::runtime_error("InterpolatorBank: error variance out of [0, 1]");
            e.variance = std::min(1.0, std::max(0.0, var));
            e.coeff.assign(a.data(), a.data() + n);
        }
    }
}

const InterpolatorBank::Entry& InterpolatorBank::entry(int offset, int tx) const {
    if (offset < n_tx_ || offset >= period_)
        throw std::invalid_argument("InterpolatorBank: offset is not a data offset");
    if (tx < 0 || tx >= n_tx_) throw std::invalid_argument("InterpolatorBank: tx out of range");
    return entries_[static_cast<std::size_t>(offset - n_tx_) * n_tx_ + tx];
}

const std::vector<int>& InterpolatorBank::lags(int offset, int tx) const {
    return entry(offset, tx).lags;
}

std::span<const cplx> InterpolatorBank::coeff(int offset, int tx) const {
    return entry(offset, tx).coeff;
}

double InterpolatorBank::error_variance(int offset, int tx) const {
    return entry(offset, tx).variance;
}

double InterpolatorBank::error_variance(int offset) const {
    double worst = 0.0;
    for (int t = 0; t < n_tx_; ++t) worst = std::max(worst, entry(offset, t).variance);
    return worst;
}

double InterpolatorBank::sigma2_star() const {
    double worst = 0.0;
    for (int off : offsets_) worst = std::max(worst, error_variance(off));
    return worst;
}

double InterpolatorBank::normal_residual(int offset, int tx) const {
    return entry(offset, tx).residual;
}

cplx InterpolatorBank::interpolate(std::span<const cplx> y, int n_rx,
                                   const FrameSchedule& schedule, int k, int r, int t) const {
    if (schedule.period() != period_ || schedule.n_tx() != n_tx_ ||
        schedule.window() != window_)
        throw std::invalid_argument("InterpolatorBank::interpolate: schedule mismatch");
    if (!schedule.is_data(k))
        throw std::invalid_argument("InterpolatorBank::interpolate: k is not a data index");
    if (r < 0 || r >= n_rx) throw std::invalid_argument("interpolate: r out of range");
    const Entry& e = entry(k % period_, t);
    thread_local std::vector<cplx> obs;
    obs.resize(e.lags.size());
    for (std::size_t i = 0; i < e.lags.size(); ++i)
        obs[i] = y[static_cast<std::size_t>(k + e.lags[i]) * n_rx + r];
    return kern::active().cdotu(e.coeff.data(), obs.data(), obs.size());
}

cplx InterpolatorBank::interpolate(const Trace& trace, const FrameSchedule& schedule, int k,
                                   int r, int t) const {
    return interpolate(trace.y, trace.n_rx, schedule, k, r, t);
}

double asymptotic_error_variance(const Spectrum& psd, int L, double snr, int ell) {
    if (L < 1) throw std::invalid_argument("asymptotic_error_variance: L must be >= 1");
    if (ell < 0 || ell >= L)
        throw std::invalid_argument("asymptotic_error_variance: ell out of [0, L)");
    if (!(snr > 0.0)) throw std::invalid_argument("asymptotic_error_variance: snr must be > 0");
    const auto pts = psd.folded_breakpoints(L);
    const double integral = quad::integrate(
        [&](double x, double toward) {
            const cplx fl = psd.folded_limit(L, ell, x, toward);
            const double f0 = psd.folded_base_limit(L, x, toward);
            return snr * std::norm(fl) / (snr * f0 + 1.0);
        },
        std::span<const double>(pts), psd.grid_points());
    const double var = 1.0 - integral;
    return std::min(1.0, std::max(0.0, var));
}

AsymptoticErrorProfile::AsymptoticErrorProfile(const Spectrum& psd, int L, double snr,
                                               int n_tx) {
    if (n_tx < 1 || L <= n_tx)
        throw std::invalid_argument("AsymptoticErrorProfile: need 1 <= n_tx < L");
    // Antenna t's pilot comb sits at offset t, so the data instant at offset
    // ell has lag residue ell - t relative to it.
    for (int off = n_tx; off < L; ++off) {
        double worst = 0.0;
        for (int t = 0; t < n_tx; ++t)
            worst = std::max(worst, asymptotic_error_variance(psd, L, snr, off - t));
        offsets.push_back(off);
        sigma2.push_back(worst);
        sigma2_star = std::max(sigma2_star, worst);
    }
    sigma2_hat = 1.0 - sigma2_star;
}

} // namespace pace
