// SPDX-License-Identifier: Apache-2.0

#include "odor/cli.hpp"

int main(int argc, char** argv) { return odor::run_cli(argc, argv); }
