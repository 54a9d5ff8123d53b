// SPDX-License-Identifier: Apache-2.0

#include "pace/fading.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "pace/kernels.hpp"

namespace pace {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

int next_pow2(long n) {
    int g = 1;
    while (g < n) g <<= 1;
    return g;
}

} // namespace

FadingProcess::FadingProcess(const Spectrum& psd, int length, int oversample, int margin)
    : length_(length), margin_(margin) {
    if (length < 1) throw std::invalid_argument("FadingProcess: length must be >= 1");
    if (oversample < 2) throw std::invalid_argument("FadingProcess: oversample must be >= 2");
    if (margin < 0) throw std::invalid_argument("FadingProcess: margin must be >= 0");
    const long total = static_cast<long>(length) + 2L * margin;
    grid_ = next_pow2(oversample * total);

    // Grid frequencies g/G mapped to [-1/2, 1/2); keep only in-band bins.
    double power = 0.0;
    for (int g = 0; g < grid_; ++g) {
        const double lam = (g < grid_ / 2) ? static_cast<double>(g) / grid_
                                           : static_cast<double>(g) / grid_ - 1.0;
        const double f = psd.density(lam);
        if (f > 0.0) {
            band_index_.push_back(g);
            band_weight_.push_back(f);
            power += f;
        }
    }
    if (band_index_.empty())
        throw std::runtime_error("FadingProcess: density vanishes on the whole grid");
    // Normalize total grid power to one so every stream has unit variance.
    for (auto& w : band_weight_) w = std::sqrt(w / power);

    std::lock_guard<std::mutex> lock(fftw_mutex());
    std::vector<cplx> tmp_in(grid_), tmp_out(grid_);
    plan_ = fftw_plan_dft_1d(grid_, reinterpret_cast<fftw_complex*>(tmp_in.data()),
                             reinterpret_cast<fftw_complex*>(tmp_out.data()), FFTW_BACKWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw std::runtime_error("FadingProcess: FFTW plan creation failed");
}

FadingProcess::~FadingProcess() {
    if (plan_) {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
}

FadingProcess::Workspace FadingProcess::make_workspace() const {
    Workspace ws;
    ws.freq.resize(grid_);
    ws.time.resize(grid_);
    return ws;
}

void FadingProcess::sample(Rng& rng, std::span<cplx> out, Workspace& ws) const {
    if (out.size() < static_cast<std::size_t>(length_))
        throw std::invalid_argument("FadingProcess::sample: output too short");
    if (ws.freq.size() != static_cast<std::size_t>(grid_)) ws = make_workspace();
    std::fill(ws.freq.begin(), ws.freq.end(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < band_index_.size(); ++i)
        ws.freq[band_index_[i]] = band_weight_[i] * rng.cgauss();
    fftw_execute_dft(static_cast<fftw_plan>(plan_),
                     reinterpret_cast<fftw_complex*>(ws.freq.data()),
                     reinterpret_cast<fftw_complex*>(ws.time.data()));
    std::copy(ws.time.begin() + margin_, ws.time.begin() + margin_ + length_, out.begin());
}

void FadingProcess::sample(Rng& rng, std::span<cplx> out) const {
    Workspace ws = make_workspace();
    sample(rng, out, ws);
}

std::vector<cplx> sample_fading(const Spectrum& psd, int n_rx, int n_tx, int length,
                                std::uint64_t seed, int oversample, int margin) {
    if (n_rx < 1 || n_tx < 1) throw std::invalid_argument("sample_fading: antenna counts >= 1");
    FadingProcess proc(psd, length, oversample, margin);
    auto ws = proc.make_workspace();
    std::vector<cplx> h(static_cast<std::size_t>(length) * n_rx * n_tx);
    std::vector<cplx> stream(length);
    for (int r = 0; r < n_rx; ++r) {
        for (int t = 0; t < n_tx; ++t) {
            Rng rng(derive_seed(seed, 0x68u, static_cast<std::uint64_t>(r),
                                static_cast<std::uint64_t>(t)));
            proc.sample(rng, stream, ws);
            for (int k = 0; k < length; ++k)
                h[static_cast<std::size_t>(k) * n_rx * n_tx + static_cast<std::size_t>(r) * n_tx + t] =
                    stream[k];
        }
    }
    return h;
}

std::vector<cplx> apply_channel(const ChannelParams& params, std::span<const cplx> h,
                                std::span<const cplx> x, std::span<const cplx> z) {
    const int nr = params.n_rx, nt = params.n_tx;
    if (nr < 1 || nt < 1) throw std::invalid_argument("apply_channel: antenna counts >= 1");
    if (!(params.snr > 0.0)) throw std::invalid_argument("apply_channel: snr must be > 0");
    if (h.size() % (static_cast<std::size_t>(nr) * nt) != 0)
        throw std::invalid_argument("apply_channel: fading size not a multiple of n_rx*n_tx");
    const std::size_t length = h.size() / (static_cast<std::size_t>(nr) * nt);
    if (x.size() != length * nt || z.size() != length * nr)
        throw std::invalid_argument("apply_channel: input/noise length mismatch");
    const double scale = std::sqrt(params.snr / nt);
    std::vector<cplx> y(length * nr);
    for (std::size_t k = 0; k < length; ++k) {
        const cplx* hk = h.data() + k * nr * nt;
        const cplx* xk = x.data() + k * nt;
        for (int r = 0; r < nr; ++r) {
            cplx acc = kern::active().cdotu(hk + static_cast<std::size_t>(r) * nt, xk, nt);
            y[k * nr + r] = scale * acc + z[k * nr + r];
        }
    }
    return y;
}

std::vector<cplx> build_inputs(const FrameSchedule& schedule, int n_tx,
                               std::span<const cplx> codeword, Rng& rng) {
    if (n_tx != schedule.n_tx())
        throw std::invalid_argument("build_inputs: n_tx disagrees with schedule");
    const int total = schedule.total_length();
    std::vector<cplx> x(static_cast<std::size_t>(total) * n_tx, cplx{0.0, 0.0});
    for (int k = 0; k < total; ++k)
        if (schedule.is_pilot(k))
            x[static_cast<std::size_t>(k) * n_tx + schedule.pilot_antenna(k)] = cplx{1.0, 0.0};
    const auto& data = schedule.data_indices();
    if (!codeword.empty() && codeword.size() != data.size() * static_cast<std::size_t>(n_tx))
        throw std::invalid_argument("build_inputs: codeword length mismatch");
    for (std::size_t n = 0; n < data.size(); ++n) {
        cplx* slot = x.data() + static_cast<std::size_t>(data[n]) * n_tx;
        if (codeword.empty()) {
            for (int t = 0; t < n_tx; ++t) slot[t] = rng.cgauss();
        } else {
            std::copy_n(codeword.data() + n * n_tx, n_tx, slot);
        }
    }
    return x;
}

Trace simulate_trace(const Spectrum& psd, const ChannelParams& params,
                     const FrameSchedule& schedule, std::span<const cplx> codeword,
                     std::uint64_t seed, int oversample) {
    Trace tr;
    tr.n_rx = params.n_rx;
    tr.n_tx = params.n_tx;
    tr.length = schedule.total_length();
    tr.snr = params.snr;
    tr.seed = seed;
    const int margin = 4 * schedule.period() * schedule.window();
    tr.h = sample_fading(psd, params.n_rx, params.n_tx, tr.length, seed, oversample, margin);
    Rng x_rng(derive_seed(seed, 0x78u));
    tr.x = build_inputs(schedule, params.n_tx, codeword, x_rng);
    Rng z_rng(derive_seed(seed, 0x7au));
    tr.z.resize(static_cast<std::size_t>(tr.length) * params.n_rx);
    z_rng.fill_cgauss(tr.z);
    tr.y = apply_channel(params, tr.h, tr.x, tr.z);
    return tr;
}

namespace {

void put_c64(std::FILE* f, std::span<const cplx> v) {
    for (const cplx& c : v) {
        const float re = static_cast<float>(c.real()), im = static_cast<float>(c.imag());
        std::fwrite(&re, sizeof re, 1, f);
        std::fwrite(&im, sizeof im, 1, f);
    }
}

void get_c64(std::FILE* f, std::vector<cplx>& v, std::size_t n) {
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        float re = 0.0f, im = 0.0f;
        if (std::fread(&re, sizeof re, 1, f) != 1 || std::fread(&im, sizeof im, 1, f) != 1)
            throw std::runtime_error("read_trace: truncated payload");
        v[i] = cplx{re, im};
    }
}

constexpr char kTraceMagic[8] = {'P', 'A', 'C', 'E', 'T', 'R', 'C', '1'};

} // namespace

void write_trace(const std::string& path, const Trace& trace) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("write_trace: cannot open " + path);
    std::fwrite(kTraceMagic, 1, sizeof kTraceMagic, f);
    const std::int32_t dims[3] = {trace.n_rx, trace.n_tx, trace.length};
    std::fwrite(dims, sizeof dims, 1, f);
    std::fwrite(&trace.seed, sizeof trace.seed, 1, f);
    std::fwrite(&trace.snr, sizeof trace.snr, 1, f);
    put_c64(f, trace.h);
    put_c64(f, trace.x);
    put_c64(f, trace.z);
    put_c64(f, trace.y);
    std::fclose(f);
}

Trace read_trace(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("read_trace: cannot open " + path);
    char magic[8];
    std::int32_t dims[3];
    Trace tr;
    if (std::fread(magic, 1, sizeof magic, f) != sizeof magic ||
        std::memcmp(magic, kTraceMagic, sizeof magic) != 0 ||
        std::fread(dims, sizeof dims, 1, f) != 1 || std::fread(&tr.seed, sizeof tr.seed, 1, f) != 1 ||
        std::fread(&tr.snr, sizeof tr.snr, 1, f) != 1) {
        std::fclose(f);
        throw std::runtime_error("read_trace: bad header in " + path);
    }
    tr.n_rx = dims[0];
    tr.n_tx = dims[1];
    tr.length = dims[2];
    const std::size_t kl = static_cast<std::size_t>(tr.length);
    try {
        get_c64(f, tr.h, kl * tr.n_rx * tr.n_tx);
        get_c64(f, tr.x, kl * tr.n_tx);
        get_c64(f, tr.z, kl * tr.n_rx);
        get_c64(f, tr.y, kl * tr.n_rx);
    } catch (...) {
        std::fclose(f);
        throw;
    }
    std::fclose(f);
    return tr;
}

} // namespace pace
