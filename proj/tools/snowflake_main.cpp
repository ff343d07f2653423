#include <string>
#include <vector>

#include "snowflake/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return snowflake::cli::main_entry(args);
}
