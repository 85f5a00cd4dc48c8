#include <dmt/cli.hpp>

int main(int argc, char** argv) { return dmt::cli_main(argc, argv); }
