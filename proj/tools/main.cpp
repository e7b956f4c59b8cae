#include <string>
#include <vector>

#include "sancdyn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sancdyn::run_cli(args);
}
