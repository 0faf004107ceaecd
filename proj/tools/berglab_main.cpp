#include "berglab/runner.hpp"

int main(int argc, char** argv) {
  return berglab::runner::main_cli(argc, argv);
}
