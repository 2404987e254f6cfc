#include "aeroflow/cli.hpp"

int main(int argc, char** argv) { return aeroflow::cli::run_cli(argc, argv); }
