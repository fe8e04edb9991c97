#include "ganlab/cli.hpp"

int main(int argc, char** argv) { return ganlab::cli::run_cli(argc, argv); }
