#include "opess/cli.hpp"

int main(int argc, char** argv) { return opess::run_cli(argc, argv); }
