#include "mfac/cli.hpp"

int main(int argc, char** argv) { return mfac::run_cli(argc, argv); }
