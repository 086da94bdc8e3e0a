#include "fmmkit/cli.hpp"

int main(int argc, char** argv) { return fmmkit::cli_main(argc, argv); }
