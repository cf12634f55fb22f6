// SPDX-License-Identifier: Apache-2.0
#include <mango_cli/commands.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
    return mango::cli::run_cli(argc, argv, std::cout, std::cerr, std::getenv("MANGO_NAV_OUTPUT"));
}
