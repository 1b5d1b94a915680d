#include "chaospec/cli.hpp"

int main(int argc, char** argv) {
  return chaospec::cli::main_entry(argc, argv);
}
