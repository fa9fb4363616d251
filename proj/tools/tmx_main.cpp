#include <iostream>
#include <vector>

#include "tmx/config.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        auto cfg = tmx::parse_args(args, std::cout);
        if (!cfg) return 0;  // help requested
        return tmx::run(*cfg, std::cout);
    } catch (const tmx::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << "run 'tmx --help' for the command list\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
