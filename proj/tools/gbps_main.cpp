#include "gbps/cli.hpp"

int main(int argc, char** argv) { return gbps::cli::run(argc, argv); }
