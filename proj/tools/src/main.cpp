#include <iostream>

#include "mfg/cli/commands.hpp"

int main(int argc, char** argv) { return mfg::cli::run(argc, argv, std::cout, std::cerr); }
