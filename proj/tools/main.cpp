#include "preth/cli.hpp"

int main(int argc, char** argv) { return preth::cli_main(argc, argv); }
