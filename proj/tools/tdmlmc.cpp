#include "tdmlmc/cli.hpp"

int main(int argc, char** argv)
{
    return tdmlmc::run_cli(argc, argv);
}
