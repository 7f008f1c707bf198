#include "gradcp/cli.hpp"

int main(int argc, char** argv) { return gradcp::cli::run(argc, argv); }
