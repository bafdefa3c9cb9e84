#include "trendkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return trendkit::run_main(argc, argv, std::cout, std::cerr);
}
