#include <iostream>
#include <string>
#include <vector>

#include "mindle/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mindle::run_cli(args, std::cin, std::cout, std::cerr);
}
