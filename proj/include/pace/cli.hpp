// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace pace::cli {

// Experiment runner: variance | gmi | prelog | simulate.
// Exit codes: 0 ok, 2 configuration error, 3 runtime error.
int run(int argc, const char* const* argv);

} // namespace pace::cli
