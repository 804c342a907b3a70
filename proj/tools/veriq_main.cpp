#include "veriq/cli.hpp"

int main(int argc, char** argv) { return veriq::cli::main(argc, argv); }
