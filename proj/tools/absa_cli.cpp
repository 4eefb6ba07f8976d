#include "absa/cli.hpp"

int main(int argc, char** argv) { return absa::cli::run(argc, argv); }
