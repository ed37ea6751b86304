#include <iostream>

#include "fbmr/cli.hpp"

int main(int argc, char** argv) { return fbmr::cli_main(argc, argv, std::cout, std::cerr); }
