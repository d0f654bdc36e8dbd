#include "gwrw/cli.hpp"

int main(int argc, char** argv) { return gwrw::run_cli(argc, argv); }
