#include <string>
#include <vector>

#include "crackpot/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return crackpot::cli_main(args);
}
