#include <iostream>
#include <string>
#include <vector>

#include "mdk/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return mdk::cli::run(args, std::cout, std::cerr);
}
