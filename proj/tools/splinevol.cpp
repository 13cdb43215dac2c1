// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return splinevol::cli::run_cli(argc, argv, std::cout, std::cerr); }
