#include "dlorenz/cli.hpp"

int main(int argc, char** argv) { return dlorenz::cli::main(argc, argv); }
