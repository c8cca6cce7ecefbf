#include <iostream>
#include <string>
#include <vector>

#include "roccet_lab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return roccet_lab::cli::run_cli(args, std::cout, std::cerr);
}
