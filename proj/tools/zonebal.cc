#include <iostream>

#include "zonebal/cli.h"

int main(int argc, char** argv) { return zonebal::cli::main(argc, argv, std::cout, std::cerr); }
