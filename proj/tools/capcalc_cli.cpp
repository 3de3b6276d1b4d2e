#include <capcalc/cli.hpp>

int main(int argc, char** argv) { return capcalc::cli::run(argc, argv, std::cout, std::cerr); }
