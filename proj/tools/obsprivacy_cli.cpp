#include "obsprivacy/cli.hpp"

int main(int argc, char** argv) { return obsprivacy::cli_main(argc, argv); }
