#include <string>
#include <vector>

#include "trackaudit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trackaudit::cli::run(args);
}
