#include "sfcf/cli.hpp"

int main(int argc, char** argv) { return sfcf::cli::run_cli(argc, argv); }
