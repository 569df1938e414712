#include <iostream>

#include "bsm/cli.hpp"

int main(int argc, char** argv) { return bsm::cli::run(argc, argv, std::cout, std::cerr); }
