#include <vector>

#include "corn/cli.hpp"

int main(int argc, char** argv) {
    return corn::cli_run(std::vector<std::string>(argv + 1, argv + argc));
}
