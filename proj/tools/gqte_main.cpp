#include "gqte/cli.hpp"

int main(int argc, char** argv) { return gqte::run_cli(argc, argv); }
