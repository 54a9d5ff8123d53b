// SPDX-License-Identifier: Apache-2.0

#include "pace/frame.hpp"

#include <sstream>

namespace pace {

FrameSchedule::FrameSchedule(int period, int n_tx, int window, int n_data)
    : period_(period), n_tx_(n_tx), window_(window), n_data_(n_data) {
    if (n_tx < 1) throw std::invalid_argument("FrameSchedule: n_tx must be >= 1");
    if (period <= n_tx)
        throw std::invalid_argument("FrameSchedule: need n_tx < L (at least one data slot per period)");
    if (window < 1) throw std::invalid_argument("FrameSchedule: window T must be >= 1");
    if (n_data < 1) throw std::invalid_argument("FrameSchedule: N must be >= 1");
    const int per_block = period - n_tx;
    if (n_data % per_block != 0)
        throw std::invalid_argument("FrameSchedule: N must be a multiple of L - n_tx");

    const int blocks = n_data / per_block;
    n_pilot_ = (blocks + 1 + 2 * (window - 1)) * n_tx;
    n_silent_ = 2 * per_block * (window - 1);
    total_ = n_pilot_ + n_data_ + n_silent_;
    data_begin_ = period * (window - 1);
    data_end_ = data_begin_ + blocks * period;

    data_indices_.reserve(n_data);
    for (int k = data_begin_; k < data_end_; ++k)
        if (k % period >= n_tx) data_indices_.push_back(k);
}

FrameSchedule::Slot FrameSchedule::slot(int k) const {
    if (k < 0 || k >= total_) throw std::invalid_argument("FrameSchedule::slot: index out of frame");
    if (k % period_ < n_tx_) return Slot::pilot;
    return (k >= data_begin_ && k < data_end_) ? Slot::data : Slot::silent;
}

int FrameSchedule::pilot_antenna(int k) const {
    if (slot(k) != Slot::pilot)
        throw std::invalid_argument("FrameSchedule::pilot_antenna: not a pilot slot");
    return k % period_;
}

std::vector<int> FrameSchedule::pilot_indices() const {
    std::vector<int> out;
    out.reserve(n_pilot_);
    for (int k = 0; k < total_; ++k)
        if (k % period_ < n_tx_) out.push_back(k);
    return out;
}

std::vector<int> FrameSchedule::silent_indices() const {
    std::vector<int> out;
    out.reserve(n_silent_);
    for (int k = 0; k < total_; ++k)
        if (slot(k) == Slot::silent) out.push_back(k);
    return out;
}

std::vector<int> FrameSchedule::data_offsets() const {
    std::vector<int> out;
    out.reserve(period_ - n_tx_);
    for (int off = n_tx_; off < period_; ++off) out.push_back(off);
    return out;
}

std::string FrameSchedule::to_json() const {
    auto dump = [](std::ostringstream& os, const std::vector<int>& v) {
        os << '[';
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << ']';
    };
    std::ostringstream os;
    os << "{\"period\":" << period_ << ",\"n_tx\":" << n_tx_ << ",\"window\":" << window_
       << ",\"n_data\":" << n_data_ << ",\"n_pilot\":" << n_pilot_
       << ",\"n_silent\":" << n_silent_ << ",\"total_length\":" << total_ << ",\"pilot\":";
    dump(os, pilot_indices());
    os << ",\"data\":";
    dump(os, data_indices_);
    os << ",\"silent\":";
    dump(os, silent_indices());
    os << "}";
    return os.str();
}

} // namespace pace
