#include <iostream>
#include <string>
#include <vector>

#include "defilab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return defilab::run_cli(args, std::cout, std::cerr);
}
