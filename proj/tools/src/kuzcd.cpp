#include <iostream>

#include "kcd/cli/app.hpp"

int main(int argc, char** argv) { return kcd::cli::run(argc, argv, std::cout, std::cerr); }
