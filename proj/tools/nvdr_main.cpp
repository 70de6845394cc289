#include "nvdr/cli.hpp"

int main(int argc, char** argv) { return nvdr::run_cli(argc, argv); }
