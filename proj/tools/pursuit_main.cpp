#include "pursuit/cli_app.hpp"

int main(int argc, char** argv) { return pursuit::run_cli(argc, argv); }
