#include "plateau/cli.hpp"

int main(int argc, char** argv) { return plateau::run_cli(argc, argv); }
