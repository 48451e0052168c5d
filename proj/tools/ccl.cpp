#include <iostream>

#include "ccl/cli/run.hpp"

int main(int argc, char** argv) { return ccl::cli::main_entry(argc, argv, std::cout, std::cerr); }
