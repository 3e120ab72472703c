#include <iostream>

#include "collab/service/cli.hpp"

int main(int argc, char** argv) {
    return collab::service::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
