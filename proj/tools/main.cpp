#include "matchmix/cli.hpp"

int main(int argc, char** argv) { return matchmix::cli::run(argc, argv); }
