#include <iostream>

#include "qmx/cli.hpp"

int main(int argc, char** argv) { return qmx::cli::run(argc, argv, std::cout, std::cerr); }
