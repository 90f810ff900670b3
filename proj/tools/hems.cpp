#include <iostream>

#include "hems/cli.hpp"

int main(int argc, char** argv) { return hems::cli::run(argc, argv, std::cout, std::cerr); }
