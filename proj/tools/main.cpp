#include <iostream>

#include "modereg/cli.hpp"

int main(int argc, char** argv) { return modereg::cli::run(argc, argv, std::cout, std::cerr); }
