#include "mcub_cli.hpp"

int main(int argc, char** argv) { return mcub::cli::run({argv + 1, argv + argc}); }
