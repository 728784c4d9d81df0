#include "cso/cli.hpp"

int main(int argc, char** argv) { return cso::cli_main(argc, argv); }
