#include <iostream>
#include <string>
#include <vector>

#include "prunekit/cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return prunekit::cli::dispatch(args, std::cout, std::cerr);
}
