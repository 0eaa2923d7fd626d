#include <iostream>

#include "tecgp/cli.hpp"

int main(int argc, char** argv) { return tecgp::run_cli(argc, argv, std::cout, std::cerr); }
