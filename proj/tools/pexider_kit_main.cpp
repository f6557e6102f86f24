#include <string>
#include <vector>

#include "pexider/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pexider::cli::run(args);
}
