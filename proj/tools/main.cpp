#include <iostream>
#include <string>
#include <vector>

#include "primediff/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return primediff::dispatch(args, std::cout, std::cerr);
}
