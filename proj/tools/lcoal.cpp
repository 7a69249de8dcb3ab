#include "lcoal/cli/dispatch.hpp"

int main(int argc, char** argv) { return lcoal::cli::run_cli(argc, argv); }
