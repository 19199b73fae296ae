#include <clarklab/cli.hpp>

int main(int argc, char** argv) { return clarklab::cli::run(argc, argv); }
