#include "firedes/cli.hpp"

int main(int argc, char** argv) { return firedes::cli::run_cli(argc, argv); }
