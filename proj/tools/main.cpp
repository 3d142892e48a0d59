#include "overlapcheck/cli.hpp"

int main(int argc, char** argv) { return overlapcheck::cli_main(argc, argv); }
