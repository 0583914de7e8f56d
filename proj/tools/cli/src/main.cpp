#include <iostream>

#include "orbitchaos/cli/cli.hpp"

int main(int argc, char** argv) { return orbitchaos::cli::run(argc, argv, std::cout, std::cerr); }
