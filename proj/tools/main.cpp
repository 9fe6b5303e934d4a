#include <iostream>
#include <string>
#include <vector>

#include "gtqw_cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return gtqw::cli::run(args, std::cout, std::cerr);
}
