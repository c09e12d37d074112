#include "bgt/cli.hpp"

int main(int argc, char** argv) { return bgt::cli::dispatch(argc, argv); }
