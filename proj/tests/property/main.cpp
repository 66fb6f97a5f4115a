#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "props.hpp"

std::uint64_t g_seed = fanlib::testgen::seed_from_env();

int main(int argc, char** argv) {
  std::vector<char*> rest;
  for (int i = 0; i < argc; ++i) {
    if (std::strncmp(argv[i], "--seed=", 7) == 0) {
      g_seed = std::stoull(argv[i] + 7);
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      g_seed = std::stoull(argv[++i]);
    } else {
      rest.push_back(argv[i]);
    }
  }
  doctest::Context ctx(static_cast<int>(rest.size()), rest.data());
  int rc = ctx.run();
  if (ctx.shouldExit()) return rc;
  return rc;
}
