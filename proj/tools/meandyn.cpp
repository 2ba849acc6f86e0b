#include <meandyn/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return meandyn::cli::run(argc, argv, std::cout, std::cerr);
}
