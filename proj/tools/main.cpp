#include "affordance/cli/cli.hpp"

int main(int argc, char** argv) { return affordance::cli::run_cli(argc, argv); }
