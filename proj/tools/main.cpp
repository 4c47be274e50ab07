#include "rdbia_cli.hpp"

int main(int argc, char** argv) { return rdbia::cli::run_cli(argc, argv); }
