#include <iostream>

#include "chmlab_cli.hpp"

int main(int argc, char** argv) { return chmlab::cli::run(argc, argv, std::cout, std::cerr); }
