#include <iostream>

#include "protorel/cli.hpp"

int main(int argc, char** argv) { return protorel::cli::run(argc, argv, std::cout, std::cerr); }
