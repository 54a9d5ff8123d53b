// SPDX-License-Identifier: Apache-2.0
//
// Deterministic pilot/data/guard time layout. Index 0 is the first pilot
// slot of the leading guard period, so k mod L is the within-period offset.
// Pilots occupy the first n_tx slots of every period (antenna t at offset t);
// the data region of K = N/(L - n_tx) periods is fenced by one extra pilot
// block and padded by guard periods of L(T-1) instants on both sides.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pace {

class FrameSchedule {
  public:
    enum class Slot { pilot, data, silent };

    // period = L, n_tx = n_t, window = T (estimator half-window in periods),
    // n_data = N. Throws std::invalid_argument on violated preconditions.
    FrameSchedule(int period, int n_tx, int window, int n_data);

    int period() const { return period_; }
    int n_tx() const { return n_tx_; }
    int window() const { return window_; }
    int n_data() const { return n_data_; }

    int n_pilot() const { return n_pilot_; }      // N_p
    int n_silent() const { return n_silent_; }    // N_un
    int total_length() const { return total_; }   // N'

    int data_begin() const { return data_begin_; }
    int data_end() const { return data_end_; }

    Slot slot(int k) const;
    bool is_data(int k) const { return slot(k) == Slot::data; }
    bool is_pilot(int k) const { return slot(k) == Slot::pilot; }
    // 0-based transmit antenna excited by pilot slot k.
    int pilot_antenna(int k) const;
    int offset_of(int k) const { return k % period_; }

    // Data slot indices in transmission order (codeword symbol n sits at
    // data_indices()[n]).
    const std::vector<int>& data_indices() const { return data_indices_; }
    std::vector<int> pilot_indices() const;
    std::vector<int> silent_indices() const;

    // Within-period offsets carrying data: {n_tx, ..., L-1}.
    std::vector<int> data_offsets() const;

    std::string to_json() const;

  private:
    int period_, n_tx_, window_, n_data_;
    int n_pilot_, n_silent_, total_, data_begin_, data_end_;
    std::vector<int> data_indices_;
};

} // namespace pace
