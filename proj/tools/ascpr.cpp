#include "ascpr/harness/cli.hpp"

int main(int argc, char** argv) { return ascpr::harness::cli_main(argc, argv); }
