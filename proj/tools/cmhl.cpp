#include "cmlab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return cmlab::run_cli(args, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "cmhl: " << e.what() << "\n";
        return cmlab::kExitFail;
    }
}
