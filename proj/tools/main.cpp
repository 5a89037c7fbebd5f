#include "hpmod/cli.hpp"

int main(int argc, char** argv) { return hpmod::cli::run(argc, argv); }
