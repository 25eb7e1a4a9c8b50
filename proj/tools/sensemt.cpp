#include "sensemt/cli.hpp"

int main(int argc, char** argv) { return sensemt::cli::dispatch(argc, argv); }
