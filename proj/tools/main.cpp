#include <iostream>
#include <string>
#include <vector>

#include "qdport/cli.hpp"

int main(int argc, char** argv) {
    return qdport::cli_dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
