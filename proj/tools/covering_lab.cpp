#include "covlab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return covlab::cli::main(argc, argv, std::cout, std::cerr); }
