#include <iostream>

#include "swavg/cli.hpp"

int main(int argc, char** argv) { return swavg::cli::run(argc, argv, std::cout, std::cerr); }
