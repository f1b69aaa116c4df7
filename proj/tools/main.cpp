#include <iostream>

#include "sorw/cli/commands.hpp"

int main(int argc, char** argv) { return sorw::cli::run(argc, argv, std::cout, std::cerr); }
