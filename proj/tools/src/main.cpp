#include <iostream>

#include "isirate_cli/commands.hpp"

int main(int argc, char** argv)
{
    return isirate::cli::run_cli(argc, argv, std::cout, std::cerr);
}
