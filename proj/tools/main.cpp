#include <iostream>

#include "labflow/gateway/cli.hpp"

int main(int argc, char** argv) { return labflow::gateway::cli_main(argc, argv, std::cin, std::cout, std::cerr); }
