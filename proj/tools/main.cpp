#include "cli.hpp"

int main(int argc, char** argv) {
  return synthbal::cli::run_cli(argc, argv);
}
