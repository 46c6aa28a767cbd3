#include "tspmdf/cli.hpp"

int main(int argc, char** argv) { return tspmdf::run_cli(argc, argv); }
