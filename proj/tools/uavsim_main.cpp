#include "uavsim/cli.hpp"

int
main(int argc, char** argv)
{
    return uavsim::run_cli(argc, argv);
}
