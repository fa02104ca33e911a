#include "hnc/cli.hpp"

int main(int argc, char** argv) { return hnc::cli_main(argc, argv); }
