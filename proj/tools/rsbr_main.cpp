#include <iostream>
#include <string>
#include <vector>

#include "rsbr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return rsbr::cli::run(args, std::cout, std::cerr);
}
