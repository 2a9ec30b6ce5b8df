#include "kinchem/cli.hpp"

int main(int argc, char** argv) { return kinchem::cli_main(argc, argv); }
