#include "cinemaloop/cli.hpp"

int main(int argc, char** argv) { return cinemaloop::run_cli(argc, argv); }
