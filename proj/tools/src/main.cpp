#include "adherence/cli/commands.hpp"

int main(int argc, char** argv) { return adherence::cli::run_cli(argc, argv); }
