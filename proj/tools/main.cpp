#include <iostream>

#include "fbl/cli.hpp"

int main(int argc, char** argv) { return fbl::run(argc, argv, std::cout, std::cerr); }
