#include "mshine/cli.hpp"

int main(int argc, char** argv) { return mshine::run_cli(argc, argv); }
