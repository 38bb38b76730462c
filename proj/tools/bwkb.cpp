#include "bwkb/cli.hpp"

int main(int argc, char** argv) { return bwkb::run_cli(argc, argv); }
