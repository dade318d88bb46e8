#include "cli.hpp"

int main(int argc, char** argv) { return circlepat::cli::run(argc, argv, std::cout, std::cerr); }
