// SPDX-License-Identifier: Apache-2.0

#include "pace/cli.hpp"

int main(int argc, char** argv) { return pace::cli::run(argc, argv); }
