// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return overflow::cli::run(argc, argv, std::cout, std::cerr); }
