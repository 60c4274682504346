#include <iostream>

#include "uforge/harness/cli.hpp"

int main(int argc, char** argv) { return uforge::harness::run_cli(argc, argv, std::cout, std::cerr); }
