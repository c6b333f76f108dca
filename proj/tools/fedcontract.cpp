#include <iostream>

#include "fedcontract/cli.hpp"

int main(int argc, char** argv) { return fedcontract::cli::run(argc, argv, std::cout, std::cerr); }
