#include "sparsedens/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sparsedens::run_cli(argc, argv, std::cout, std::cerr); }
