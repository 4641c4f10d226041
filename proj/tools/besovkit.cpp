#include "besovkit/cli.hpp"

int main(int argc, char** argv) { return besovkit::run(argc, argv); }
