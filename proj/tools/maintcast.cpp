#include "maintcast/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return maintcast::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
