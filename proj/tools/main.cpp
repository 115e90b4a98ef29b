#include "plnlc/cli.hpp"

int main(int argc, char **argv) { return plnlc::run_cli(argc, argv); }
