#include "kronspec/cli.hpp"

int main(int argc, char** argv) { return kronspec::run_cli(argc, argv); }
