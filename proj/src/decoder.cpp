// SPDX-License-Identifier: Apache-2.0

#include "pace/decoder.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pace/kernels.hpp"
#include "pace/mc.hpp"

namespace pace {

Codebook generate_codebook(int n_messages, int length, int n_tx, std::uint64_t seed,
                           std::size_t memory_cap_bytes) {
    if (n_messages < 1) throw std::invalid_argument("generate_codebook: need >= 1 message");
    if (length < 1 || n_tx < 1)
        throw std::invalid_argument("generate_codebook: length and n_tx must be >= 1");
    const std::size_t entries = static_cast<std::size_t>(n_messages) * length * n_tx;
    if (entries * sizeof(cplx) > memory_cap_bytes)
        throw std::invalid_argument("generate_codebook: size exceeds configured memory cap");
    Codebook cb;
    cb.n_messages = n_messages;
    cb.length = length;
    cb.n_tx = n_tx;
    cb.seed = seed;
    cb.symbols.resize(entries);
    Rng rng(derive_seed(seed, 0x636fu));
    rng.fill_cgauss(cb.symbols);
    return cb;
}

int messages_for_rate(int length, double rate_nats) {
    const double raw = std::exp(length * rate_nats);
    const double capped = std::min(raw, 65536.0);
    return std::max(1, static_cast<int>(std::lround(capped)));
}

double nn_metric(std::span<const cplx> y, std::span<const cplx> h_hat, std::span<const cplx> x,
                 double snr, int n_rx, int n_tx) {
    if (n_rx < 1 || n_tx < 1) throw std::invalid_argument("nn_metric: antenna counts >= 1");
    if (y.size() % n_rx != 0) throw std::invalid_argument("nn_metric: y size mismatch");
    const std::size_t n = y.size() / n_rx;
    if (h_hat.size() != n * static_cast<std::size_t>(n_rx) * n_tx ||
        x.size() != n * static_cast<std::size_t>(n_tx))
        throw std::invalid_argument("nn_metric: misaligned lengths");
    const double scale = std::sqrt(snr / n_tx);
    const auto& k = kern::active();
    if (n_rx == 1 && n_tx == 1) {
        thread_local std::vector<cplx> p;
        p.resize(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = scale * h_hat[i];
        return k.dist2_mul(y.data(), p.data(), x.data(), n);
    }
    thread_local std::vector<cplx> z;
    z.resize(y.size());
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* hk = h_hat.data() + i * n_rx * n_tx;
        const cplx* xk = x.data() + i * n_tx;
        for (int r = 0; r < n_rx; ++r)
            z[i * n_rx + r] = k.cdotu(hk + static_cast<std::size_t>(r) * n_tx, xk, n_tx);
    }
    return k.dist2(y.data(), z.data(), cplx{scale, 0.0}, y.size());
}

DecodeResult decode(std::span<const cplx> y, std::span<const cplx> h_hat, const Codebook& cb,
                    double snr, int n_rx, bool keep_metrics) {
    if (cb.n_messages < 1) throw std::invalid_argument("decode: empty codebook");
    DecodeResult res;
    if (keep_metrics) res.metrics.resize(cb.n_messages);
    double best = 0.0;
    const bool scalar_path = (cb.n_tx == 1 && n_rx == 1);
    thread_local std::vector<cplx> pfold;
    if (scalar_path) {
        const double scale = std::sqrt(snr / cb.n_tx);
        pfold.resize(h_hat.size());
        for (std::size_t i = 0; i < h_hat.size(); ++i) pfold[i] = scale * h_hat[i];
    }
    const auto& k = kern::active();
    for (int m = 0; m < cb.n_messages; ++m) {
        const auto x = cb.codeword(m);
        const double d = scalar_path
                             ? k.dist2_mul(y.data(), pfold.data(), x.data(), y.size())
                             : nn_metric(y, h_hat, x, snr, n_rx, cb.n_tx);
        if (keep_metrics) res.metrics[m] = d;
        if (m == 0 || d < best) { // ties keep the lowest index
            best = d;
            res.message = m;
        }
    }
    return res;
}

LinkSimulator::LinkSimulator(const Spectrum& psd, const ChannelParams& params,
                             const FrameSchedule& schedule, int oversample)
    : params_(params),
      schedule_(schedule),
      process_(psd, schedule.total_length(), oversample,
               4 * schedule.period() * schedule.window()),
      bank_(psd, schedule.period(), schedule.n_tx(), schedule.window(), params.snr) {
    if (params.n_tx != schedule.n_tx())
        throw std::invalid_argument("LinkSimulator: params/schedule n_tx mismatch");
}

Trace LinkSimulator::run(std::uint64_t trial_seed, std::span<const cplx> codeword) const {
    Trace tr;
    tr.n_rx = params_.n_rx;
    tr.n_tx = params_.n_tx;
    tr.length = schedule_.total_length();
    tr.snr = params_.snr;
    tr.seed = trial_seed;
    tr.h.resize(static_cast<std::size_t>(tr.length) * tr.n_rx * tr.n_tx);
    thread_local FadingProcess::Workspace ws;
    thread_local std::vector<cplx> stream;
    stream.resize(tr.length);
    for (int r = 0; r < tr.n_rx; ++r) {
        for (int t = 0; t < tr.n_tx; ++t) {
            Rng rng(derive_seed(trial_seed, 0x68u, static_cast<std::uint64_t>(r),
                                static_cast<std::uint64_t>(t)));
            process_.sample(rng, stream, ws);
            for (int k = 0; k < tr.length; ++k)
                tr.h[static_cast<std::size_t>(k) * tr.n_rx * tr.n_tx +
                     static_cast<std::size_t>(r) * tr.n_tx + t] = stream[k];
        }
    }
    Rng x_rng(derive_seed(trial_seed, 0x78u));
    tr.x = build_inputs(schedule_, params_.n_tx, codeword, x_rng);
    Rng z_rng(derive_seed(trial_seed, 0x7au));
    tr.z.resize(static_cast<std::size_t>(tr.length) * params_.n_rx);
    z_rng.fill_cgauss(tr.z);
    tr.y = apply_channel(params_, tr.h, tr.x, tr.z);
    return tr;
}

void LinkSimulator::data_view(const Trace& trace, std::vector<cplx>& y_data,
                              std::vector<cplx>& h_hat_data) const {
    const auto& data = schedule_.data_indices();
    const int nr = params_.n_rx, nt = params_.n_tx;
    y_data.resize(data.size() * nr);
    h_hat_data.resize(data.size() * nr * nt);
    for (std::size_t n = 0; n < data.size(); ++n) {
        const int k = data[n];
        for (int r = 0; r < nr; ++r) {
            y_data[n * nr + r] = trace.y[static_cast<std::size_t>(k) * nr + r];
            for (int t = 0; t < nt; ++t)
                h_hat_data[(n * nr + r) * nt + t] =
                    bank_.interpolate(trace.y, nr, schedule_, k, r, t);
        }
    }
}

std::string LinkStats::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"trials\":" << trials << ",\"frame_errors\":" << frame_errors << ",\"fer\":" << fer
       << ",\"mean_metric_correct\":" << mean_metric_correct
       << ",\"mean_metric_incorrect\":" << mean_metric_incorrect << "}";
    return os.str();
}

LinkStats simulate_link(const Spectrum& psd, const ChannelParams& params,
                        const FrameSchedule& schedule, const Codebook& cb, long trials,
                        std::uint64_t seed, int threads, int oversample) {
    if (cb.n_tx != params.n_tx)
        throw std::invalid_argument("simulate_link: codebook/params n_tx mismatch");
    if (cb.length != static_cast<int>(schedule.data_indices().size()))
        throw std::invalid_argument("simulate_link: codeword length must equal N data vectors");
    LinkSimulator sim(psd, params, schedule, oversample);
    const int M = cb.n_messages;
    auto est = mc::run(trials, seed, threads, 3, [&](Rng& rng, double* out) {
        const int sent = static_cast<int>(rng.uniform() * M) % M;
        const Trace tr = sim.run(rng.u64(), cb.codeword(sent));
        thread_local std::vector<cplx> yd, hd;
        sim.data_view(tr, yd, hd);
        const DecodeResult res = decode(yd, hd, cb, params.snr, params.n_rx, true);
        double incorrect = 0.0;
        for (int m = 0; m < M; ++m)
            if (m != sent) incorrect += res.metrics[m];
        out[0] = res.message == sent ? 0.0 : 1.0;
        out[1] = res.metrics[sent];
        out[2] = M > 1 ? incorrect / (M - 1) : 0.0;
    });
    LinkStats stats;
    stats.trials = trials;
    stats.frame_errors = std::lround(est.mean[0] * trials);
    stats.fer = est.mean[0];
    stats.mean_metric_correct = est.mean[1];
    stats.mean_metric_incorrect = est.mean[2];
    return stats;
}

} // namespace pace
