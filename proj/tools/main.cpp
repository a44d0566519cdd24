#include "e2t/cli.hpp"

int main(int argc, char** argv) { return e2t::run_cli(argc, argv); }
