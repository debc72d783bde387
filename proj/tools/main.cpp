// SPDX-License-Identifier: Apache-2.0
#include <beampred/cli.hpp>

int main(int argc, char** argv) { return beampred::cli_main(argc, argv); }
