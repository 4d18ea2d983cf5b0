#include <cstdio>
#include <iostream>

#include "georoute/validation.hpp"

// One PASS/FAIL line per acceptance criterion, indented details below it.
int main(int argc, char** argv) {
  georoute::ValidationOptions o;
  if (argc > 1) o.cli_path = argv[1];
  bool all = true;
  for (int id = 1; id <= 10; ++id) {
    georoute::CriterionResult r = georoute::run_criterion(id, o);
    all = all && r.pass;
    std::cout << georoute::format_criterion(r, true) << std::flush;
  }
  std::cout << (all ? "all criteria passed\n" : "some criteria failed\n");
  return all ? 0 : 1;
}
