#include <iostream>

#include "gtvm/cli.hpp"

int main(int argc, char** argv) { return gtvm::cli::run(argc, argv, std::cout, std::cerr); }
