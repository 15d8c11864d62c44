#include "dyadim/runner.hpp"

int main(int argc, char** argv) { return dyadim::run_cli(argc, argv); }
