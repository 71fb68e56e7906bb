#include <iostream>

#include "nestsolve/cli.hpp"

int main(int argc, char** argv) { return nestsolve::run_cli(argc, argv, std::cout, std::cerr); }
