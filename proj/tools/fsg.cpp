#include <iostream>

#include "fsg/cli.hpp"

int main(int argc, char** argv) { return fsg::cli::run(argc, argv, std::cout, std::cerr); }
