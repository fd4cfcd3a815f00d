#include <string>
#include <vector>

#include <minfact/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return minfact::cli::run(std::move(args));
}
