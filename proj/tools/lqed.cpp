#include "lqed/cli.hpp"

int main(int argc, char** argv) { return lqed::run_cli(argc, argv); }
