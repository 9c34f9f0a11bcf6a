#include "advrain/cli.hpp"

int main(int argc, char** argv) { return advrain::cli::run(argc, argv); }
