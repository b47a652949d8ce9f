#include "padloc/cli.hpp"

int main(int argc, char** argv) { return padloc::cli_main(argc, argv); }
