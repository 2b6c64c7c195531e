#include "maserphase/cli.hpp"

int main(int argc, char** argv) { return maser::cli_main(argc, argv); }
