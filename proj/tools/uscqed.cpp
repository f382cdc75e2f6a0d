#include <iostream>

#include "uscqed/cli/commands.hpp"

int main(int argc, char** argv) { return uscqed::cli::run(argc, argv, std::cout, std::cerr); }
