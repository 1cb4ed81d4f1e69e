#include "abstop/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return abstop::cli::run(argc, argv, std::cout, std::cerr); }
