#include "silfs_cli.hpp"

int main(int argc, char** argv) { return silfs::cli::run(argc, argv); }
