#include "cycprop/cli.hpp"

int main(int argc, char** argv) { return cycprop::cli_main(argc, argv); }
