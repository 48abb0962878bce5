// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#include "ldm3d/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return ldm3d::cli::run(argc, argv, std::cout, std::cerr); }
