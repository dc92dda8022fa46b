#include <iostream>

#include "kacdp/cli.hpp"

int main(int argc, char** argv) { return kacdp::cli::run(argc, argv, std::cout, std::cerr); }
