// SPDX-License-Identifier: Apache-2.0
#include "alphaduplex/cli.hpp"

int main(int argc, char** argv) { return alphaduplex::cli_main(argc, argv); }
