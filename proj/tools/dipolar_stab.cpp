#include "dipolar/cli.hpp"

int main(int argc, char** argv) { return dipolar::cli_main(argc, argv); }
