#include "manifold_gfdm/cli.hpp"

int main(int argc, char** argv) { return mgfdm::cli_main(argc, argv); }
