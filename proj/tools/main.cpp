#include "kneecast/cli.hpp"

int main(int argc, char** argv) { return kneecast::run_cli(argc, argv); }
