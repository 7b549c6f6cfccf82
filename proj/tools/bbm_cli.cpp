#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bbm::cli::run(argc, argv, std::cout, std::cerr); }
