#include <iostream>

#include "mather_twist/cli.hpp"

int main(int argc, char** argv) {
    return mather_twist::cli_dispatch(argc, argv, std::cout, std::cerr);
}
