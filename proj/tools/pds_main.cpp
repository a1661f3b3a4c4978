#include "pds/cli.hpp"

int main(int argc, char** argv) { return pds::run_cli(argc, argv); }
