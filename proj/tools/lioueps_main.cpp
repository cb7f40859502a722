// lioueps_main.cpp — command-line entry point.

#include "lioueps/cli/execute.hpp"

#include <iostream>

int main(int argc, char** argv) { return lioueps::cli::run_cli(argc, argv, std::cout, std::cerr); }
