#include "toolwear/cli.hpp"

int main(int argc, char** argv) { return toolwear::run_cli(argc, argv); }
