#include "qimpute/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return qimpute::run_cli(argc, argv, std::cout, std::cerr); }
