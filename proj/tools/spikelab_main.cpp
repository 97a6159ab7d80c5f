#include "spikelab/cli.hpp"

int main(int argc, char** argv) { return spikelab::cli::run(argc, argv); }
