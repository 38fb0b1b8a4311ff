#include <iostream>

#include "sfa/cli.hpp"

int main(int argc, char** argv) { return sfa::cli::run(argc, argv, std::cout, std::cerr); }
