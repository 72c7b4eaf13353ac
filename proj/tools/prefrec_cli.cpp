#include "prefrec/cli/commands.hpp"

int main(int argc, char** argv) { return prefrec::cli::run_cli(argc, argv); }
