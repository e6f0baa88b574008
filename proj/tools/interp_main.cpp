#include "interp/cli.hpp"

int main(int argc, char** argv) { return interp::run_cli(argc, argv); }
