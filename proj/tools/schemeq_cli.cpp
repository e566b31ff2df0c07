#include <iostream>

#include "schemeq/cli.hpp"

int main(int argc, char** argv) { return schemeq::cli::run(argc, argv, std::cout, std::cerr); }
