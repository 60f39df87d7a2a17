#include "nhqm/cli.hpp"

int main(int argc, char** argv) { return nhqm::cli_main(argc, argv); }
