#include <cstdlib>
#include <iostream>
#include <string>

#include "klab/check/acceptance.hpp"

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : 8;
  const auto results = klab::check::run_suite(threads, [](const klab::check::CriterionResult& r) {
    std::cout << klab::check::format_result(r) << std::endl;
  });
  int failed = 0;
  for (const auto& r : results)
    if (r.outcome == klab::check::Outcome::fail) ++failed;
  std::cout << results.size() << " checks, " << failed << " failed" << std::endl;
  return klab::check::all_passed(results) ? 0 : 1;
}
