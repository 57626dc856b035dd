#include <iostream>

#include "rbsim/cli.hpp"

int main(int argc, char** argv) { return rbsim::run_cli(argc, argv, std::cout, std::cerr); }
