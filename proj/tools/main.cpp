#include <iostream>

#include "simple/cli.hpp"

int main(int argc, char** argv) { return simple::run_cli(argc, argv, std::cout, std::cerr); }
