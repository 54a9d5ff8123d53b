// SPDX-License-Identifier: Apache-2.0

#include "pace/gmi.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pace/kernels.hpp"
#include "pace/mc.hpp"

namespace pace {

namespace {
constexpr double kEulerGamma = 0.57721566490153286061;

int l_star_of(double bandwidth) {
    if (!(bandwidth > 0.0 && bandwidth < 0.5))
        throw std::invalid_argument("bandwidth must lie in (0, 1/2)");
    return static_cast<int>(std::floor(1.0 / (2.0 * bandwidth) + 1e-9));
}

// E[logdet W W'] for an n x n standard complex Gaussian W.
double e_logdet_std(int n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) {
        double psi = -kEulerGamma;
        for (int j = 1; j < k; ++j) psi += 1.0 / j;
        acc += psi;
    }
    return acc;
}
} // namespace

PrelogBound prelog_achievable(int n_tx, int n_rx, double bandwidth) {
    if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("prelog_achievable: antenna counts >= 1");
    PrelogBound res;
    res.l_star = l_star_of(bandwidth);
    const double m = std::min(n_tx, n_rx);
    res.bound = m * (1.0 - m / res.l_star);
    res.best_antennas = res.l_star / 2.0;
    res.best_bound = res.l_star / 4.0;
    return res;
}

// --------------------------------------------------------------------------
// PeriodSampler

struct PeriodSampler::Impl {
    int period, window, n_tx, n_rx;
    double snr;
    std::vector<int> offsets;
    const InterpolatorBank* bank;

    // Per transmit antenna: the union of pilot instants its estimators use
    // plus the data instants of the center period (period start at time 0).
    struct Stream {
        std::vector<int> points;
        Eigen::MatrixXcd factor;             // C = factor factor^H
        std::vector<std::vector<int>> obs_at; // per offset: indices into pilot part
        std::vector<int> pilot_points;        // pilot instants (subset of points)
        std::vector<int> data_pos;            // per offset: index of data instant in points
    };
    std::vector<Stream> streams; // [t]
};

PeriodSampler::PeriodSampler(const Spectrum& psd, const InterpolatorBank& bank, int n_rx)
    : impl_(new Impl), n_rx_(n_rx), n_tx_(bank.n_tx()) {
    if (n_rx < 1) throw std::invalid_argument("PeriodSampler: n_rx must be >= 1");
    impl_->period = bank.period();
    impl_->window = bank.window();
    impl_->n_tx = bank.n_tx();
    impl_->n_rx = n_rx;
    impl_->snr = bank.snr();
    impl_->offsets = bank.offsets();
    impl_->bank = &bank;

    impl_->streams.resize(impl_->n_tx);
    for (int t = 0; t < impl_->n_tx; ++t) {
        auto& st = impl_->streams[t];
        std::vector<int> pilots;
        for (int off : impl_->offsets)
            for (int lag : bank.lags(off, t)) pilots.push_back(off + lag);
        std::sort(pilots.begin(), pilots.end());
        pilots.erase(std::unique(pilots.begin(), pilots.end()), pilots.end());
        st.pilot_points = pilots;
        st.points = pilots;
        for (int off : impl_->offsets) st.points.push_back(off);

        const int n = static_cast<int>(st.points.size());
        const auto [min_it, max_it] = std::minmax_element(st.points.begin(), st.points.end());
        const int max_lag = *max_it - *min_it;
        std::vector<cplx> acov(static_cast<std::size_t>(max_lag) + 1);
        for (int m = 0; m <= max_lag; ++m) acov[m] = psd.autocovariance(m);
        Eigen::MatrixXcd cov(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int m = st.points[i] - st.points[j];
                cov(i, j) = m >= 0 ? acov[m] : std::conj(acov[-m]);
            }
        // The data instants oversample the bandlimited process, so the
        // covariance can be numerically semidefinite; factor by
        // eigendecomposition and clamp roundoff-negative eigenvalues.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("PeriodSampler: eigendecomposition failed");
        const double max_eig = es.eigenvalues().maxCoeff();
        Eigen::VectorXd eig = es.eigenvalues();
        for (int i = 0; i < n; ++i) {
            if (eig(i) < -1e-10 * std::max(1.0, max_eig))
                throw std::runtime_error(
                    "PeriodSampler: fading covariance is not positive semidefinite");
            eig(i) = std::sqrt(std::max(0.0, eig(i)));
        }
        st.factor = es.eigenvectors() * eig.asDiagonal();

        auto index_of = [&](int instant) {
            const auto it = std::lower_bound(pilots.begin(), pilots.end(), instant);
            return static_cast<int>(it - pilots.begin());
        };
        st.obs_at.resize(impl_->offsets.size());
        st.data_pos.resize(impl_->offsets.size());
        for (std::size_t oi = 0; oi < impl_->offsets.size(); ++oi) {
            const int off = impl_->offsets[oi];
            for (int lag : bank.lags(off, t)) st.obs_at[oi].push_back(index_of(off + lag));
            st.data_pos[oi] = static_cast<int>(pilots.size() + oi);
        }
    }
}

PeriodSampler::~PeriodSampler() { delete impl_; }

const std::vector<int>& PeriodSampler::offsets() const { return impl_->offsets; }

void PeriodSampler::draw(Rng& rng, Draw& out) const {
    const Impl& im = *impl_;
    const int nt = im.n_tx, nr = im.n_rx;
    const std::size_t n_off = im.offsets.size();
    out.h.resize(n_off * nr * nt);
    out.h_hat.resize(n_off * nr * nt);
    out.y.resize(n_off * nr);
    out.x.resize(n_off * nt);

    thread_local Eigen::VectorXcd g, hpts;
    thread_local std::vector<cplx> yobs;
    const double psi_sqrt = std::sqrt(im.snr / nt);

    for (int t = 0; t < nt; ++t) {
        const auto& st = im.streams[t];
        const int npts = static_cast<int>(st.points.size());
        g.resize(npts);
        for (int r = 0; r < nr; ++r) {
            for (int i = 0; i < npts; ++i) g(i) = rng.cgauss();
            hpts.noalias() = st.factor * g;
            // Pilot observations Y_{k'}(r) = sqrt(SNR/nt) H + Z, shared by
            // every offset of this period, as in a real frame.
            yobs.resize(st.pilot_points.size());
            for (std::size_t i = 0; i < st.pilot_points.size(); ++i)
                yobs[i] = psi_sqrt * hpts(static_cast<int>(i)) + rng.cgauss();
            for (std::size_t oi = 0; oi < n_off; ++oi) {
                out.h[(oi * nr + r) * nt + t] = hpts(st.data_pos[oi]);
                cplx est{0.0, 0.0};
                const auto coeff = im.bank->coeff(im.offsets[oi], t);
                const auto& obs = st.obs_at[oi];
                for (std::size_t i = 0; i < obs.size(); ++i) est += coeff[i] * yobs[obs[i]];
                out.h_hat[(oi * nr + r) * nt + t] = est;
            }
        }
    }
    for (std::size_t oi = 0; oi < n_off; ++oi) {
        for (int t = 0; t < nt; ++t) out.x[oi * nt + t] = rng.cgauss();
        for (int r = 0; r < nr; ++r) {
            cplx acc = kern::active().cdotu(&out.h[(oi * nr + r) * nt], &out.x[oi * nt], nt);
            out.y[oi * nr + r] = psi_sqrt * acc + rng.cgauss();
        }
    }
}

// --------------------------------------------------------------------------

double gmi_b_constant(double snr, int period, int n_tx, int n_rx,
                      std::span<const double> sigma2_sum) {
    if (static_cast<int>(sigma2_sum.size()) != period - n_tx)
        throw std::invalid_argument("gmi_b_constant: need one variance sum per data offset");
    double acc = 0.0;
    for (double s2 : sigma2_sum) // E||E_ell||_F^2 = n_r * s2
        acc += n_rx + std::sqrt(snr / n_tx) * n_rx * s2;
    return acc / period;
}

double gmi_b_constant(double snr, const InterpolatorBank& bank, int n_rx) {
    std::vector<double> s2;
    for (int off : bank.offsets()) {
        double frob = 0.0;
        for (int t = 0; t < bank.n_tx(); ++t) frob += bank.error_variance(off, t);
        s2.push_back(frob);
    }
    return gmi_b_constant(snr, bank.period(), bank.n_tx(), n_rx, s2);
}

namespace {

// theta Y' (I - theta s Hhat Hhat')^{-1} Y and logdet(I - theta s Hhat Hhat')
// for one offset; PD is guaranteed for theta <= 0.
struct MetricTerms {
    double quad, logdet;
};
MetricTerms metric_terms(const cplx* h_hat, const cplx* y, int nr, int nt, double theta,
                         double s) {
    if (nr == 1 && nt == 1) {
        const double m = 1.0 - theta * s * std::norm(h_hat[0]);
        return {theta * std::norm(y[0]) / m, std::log(m)};
    }
    Eigen::MatrixXcd hh(nr, nt);
    for (int r = 0; r < nr; ++r)
        for (int t = 0; t < nt; ++t) hh(r, t) = h_hat[r * nt + t];
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(nr, nr) - theta * s * (hh * hh.adjoint());
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    Eigen::VectorXcd yv(nr);
    for (int r = 0; r < nr; ++r) yv(r) = y[r];
    const Eigen::VectorXcd w = llt.matrixL().solve(yv);
    double logdet = 0.0;
    for (int r = 0; r < nr; ++r) logdet += 2.0 * std::log(llt.matrixL()(r, r).real());
    return {theta * w.squaredNorm(), logdet};
}

} // namespace

KappaEstimate kappa_mc(double theta, double snr, const Spectrum& psd,
                       const InterpolatorBank& bank, int n_rx, long trials, std::uint64_t seed,
                       int threads) {
    if (theta > 0.0) throw std::invalid_argument("kappa_mc: theta must be <= 0");
    const int L = bank.period(), nt = bank.n_tx();
    const double s = snr / nt;
    PeriodSampler sampler(psd, bank, n_rx);
    auto est = mc::run(trials, seed, threads, 2, [&](Rng& rng, double* out) {
        thread_local PeriodSampler::Draw d;
        sampler.draw(rng, d);
        double quad = 0.0, logdet = 0.0;
        for (std::size_t oi = 0; oi < sampler.offsets().size(); ++oi) {
            const MetricTerms mt =
                metric_terms(&d.h_hat[oi * n_rx * nt], &d.y[oi * n_rx], n_rx, nt, theta, s);
            quad += mt.quad;
            logdet += mt.logdet;
        }
        out[0] = quad / L;
        out[1] = logdet / L;
    });
    KappaEstimate k;
    k.trials = trials;
    k.quad_term = est.mean[0];
    k.quad_se = est.se[0];
    k.logdet_term = est.mean[1];
    k.logdet_se = est.se[1];
    k.kappa = est.mean[0] - est.mean[1];
    k.se = std::hypot(est.se[0], est.se[1]);
    return k;
}

McEstimate gmi_lower_bound_finite_T(double snr, const Spectrum& psd,
                                    const InterpolatorBank& bank, int n_rx, long trials,
                                    std::uint64_t seed, int threads) {
    if (!(snr > 0.0)) throw std::invalid_argument("gmi_lower_bound_finite_T: snr must be > 0");
    const int L = bank.period(), nt = bank.n_tx();
    const double s2 = bank.sigma2_star();
    const double denom = static_cast<double>(nt) * n_rx * (1.0 + snr * s2);
    PeriodSampler sampler(psd, bank, n_rx);
    auto est = mc::run(trials, seed, threads, 1, [&](Rng& rng, double* out) {
        thread_local PeriodSampler::Draw d;
        sampler.draw(rng, d);
        double acc = 0.0;
        for (std::size_t oi = 0; oi < sampler.offsets().size(); ++oi) {
            // logdet(I + SNR Hhat Hhat'/denom) via the PD form with theta=-1.
            const MetricTerms mt = metric_terms(&d.h_hat[oi * n_rx * nt], &d.y[oi * n_rx],
                                                n_rx, nt, -1.0, snr / denom);
            acc += mt.logdet;
        }
        out[0] = acc / L;
    });
    McEstimate b;
    b.trials = trials;
    b.value = est.mean[0] - static_cast<double>(L - nt) / L;
    b.se = est.se[0];
    return b;
}

AsymptoticBound gmi_lower_bound_asymptotic(double snr, int L, int n_tx, int n_rx,
                                           const Spectrum& psd, long trials,
                                           std::uint64_t seed, int threads) {
    if (!(snr > 0.0)) throw std::invalid_argument("gmi_lower_bound_asymptotic: snr must be > 0");
    if (n_tx < 1 || n_rx < 1)
        throw std::invalid_argument("gmi_lower_bound_asymptotic: antenna counts >= 1");
    if (L > l_star_of(psd.bandwidth()))
        throw std::invalid_argument(
            "gmi_lower_bound_asymptotic: L exceeds 1/(2 lambda_D); the alias-free "
            "interpolation-error limit does not apply");
    // Reduce to the square system: extra transmit antennas are left unused,
    // extra receive antennas ignored.
    const int n = std::min(n_tx, n_rx);
    if (L <= n)
        throw std::invalid_argument("gmi_lower_bound_asymptotic: need min(nt,nr) < L");

    AsymptoticBound res;
    res.sigma2_star = AsymptoticErrorProfile(psd, L, snr, n).sigma2_star;
    const double v = 1.0 - res.sigma2_star;
    const double denom = static_cast<double>(n) * n * (1.0 + snr * res.sigma2_star);
    const double ratio = static_cast<double>(L - n) / L;

    auto est = mc::run(trials, seed, threads, 2, [&](Rng& rng, double* out) {
        double ld_plus, ld_hh;
        if (n == 1) {
            const double a = v * std::norm(rng.cgauss());
            ld_plus = std::log1p(snr * a / denom);
            ld_hh = std::log(a);
        } else {
            thread_local Eigen::MatrixXcd hb;
            hb.resize(n, n);
            const double sd = std::sqrt(v);
            for (int r = 0; r < n; ++r)
                for (int t = 0; t < n; ++t) hb(r, t) = sd * rng.cgauss();
            const Eigen::MatrixXcd gram = hb * hb.adjoint();
            Eigen::LLT<Eigen::MatrixXcd> llt_hh(gram);
            ld_hh = 0.0;
            for (int r = 0; r < n; ++r) ld_hh += 2.0 * std::log(llt_hh.matrixL()(r, r).real());
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) + (snr / denom) * gram;
            Eigen::LLT<Eigen::MatrixXcd> llt(m);
            ld_plus = 0.0;
            for (int r = 0; r < n; ++r) ld_plus += 2.0 * std::log(llt.matrixL()(r, r).real());
        }
        // logdet(I + A) >= logdet(A), exact for every positive-definite draw.
        const double ld_a = n * std::log(snr / denom) + ld_hh;
        if (!(ld_plus >= ld_a - 1e-9))
            throw std::runtime_error("gmi_lower_bound_asymptotic: logdet ordering violated");
        out[0] = ld_plus;
        out[1] = ld_hh;
    });

    res.logdet_form.value = ratio * (est.mean[0] - 1.0);
    res.logdet_form.se = ratio * est.se[0];
    res.logdet_form.trials = trials;
    res.logdet_hh = {est.mean[1], est.se[1], trials};
    res.e_logdet = n * std::log(v) + e_logdet_std(n);
    res.closed_form =
        ratio * (n * std::log(snr) - n * std::log(static_cast<double>(n) * n * (1.0 + snr * res.sigma2_star)) +
                 res.e_logdet - 1.0);
    return res;
}

PrelogFit fit_prelog(std::span<const double> snr, std::span<const double> bound) {
    if (snr.size() != bound.size() || snr.size() < 3)
        throw std::invalid_argument("fit_prelog: need >= 3 matching grid points");
    double lo = snr[0], hi = snr[0];
    for (double s : snr) {
        if (!(s > 0.0)) throw std::invalid_argument("fit_prelog: snr must be > 0");
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (hi / lo < 99.999)
        throw std::invalid_argument("fit_prelog: grid must span >= 2 decades of snr");
    const std::size_t n = snr.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(snr[i]);
        sx += x;
        sy += bound[i];
        sxx += x * x;
        sxy += x * bound[i];
    }
    PrelogFit fit;
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

ThetaSweep gmi_theta_sweep(double snr, const Spectrum& psd, const InterpolatorBank& bank,
                           int n_rx, long trials, std::uint64_t seed, int threads, int n_points,
                           double decades) {
    if (n_points < 1) throw std::invalid_argument("gmi_theta_sweep: need >= 1 grid point");
    const int L = bank.period(), nt = bank.n_tx();
    const double s = snr / nt;
    const double s2 = bank.sigma2_star();
    ThetaSweep sw;
    sw.trials = trials;
    sw.theta_ref = -1.0 / (n_rx + s * nt * n_rx * s2);
    // Log-spaced |theta| across +-decades around the reference; odd counts
    // place the reference itself on the grid.
    sw.thetas.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double expo = n_points == 1 ? 0.0 : -decades + 2.0 * decades * i / (n_points - 1);
        sw.thetas[i] = sw.theta_ref * std::pow(10.0, expo);
    }
    const double b = gmi_b_constant(snr, bank, n_rx);
    PeriodSampler sampler(psd, bank, n_rx);
    auto est = mc::run(trials, seed, threads, n_points, [&](Rng& rng, double* out) {
        thread_local PeriodSampler::Draw d;
        sampler.draw(rng, d);
        for (int i = 0; i < n_points; ++i) {
            double quad = 0.0, logdet = 0.0;
            for (std::size_t oi = 0; oi < sampler.offsets().size(); ++oi) {
                const MetricTerms mt = metric_terms(&d.h_hat[oi * n_rx * nt],
                                                    &d.y[oi * n_rx], n_rx, nt, sw.thetas[i], s);
                quad += mt.quad;
                logdet += mt.logdet;
            }
            out[i] = (quad - logdet) / L; // kappa(theta_i) sample
        }
    });
    sw.bounds.resize(n_points);
    sw.ses.resize(n_points);
    int best = 0;
    for (int i = 0; i < n_points; ++i) {
        sw.bounds[i] = sw.thetas[i] * b - est.mean[i];
        sw.ses[i] = est.se[i];
        if (sw.bounds[i] > sw.bounds[best]) best = i;
    }
    sw.best_theta = sw.thetas[best];
    sw.best_bound = sw.bounds[best];
    return sw;
}

} // namespace pace
