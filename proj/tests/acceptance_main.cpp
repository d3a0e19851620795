// Full-resolution acceptance suite: one line per criterion.

#include <cstdio>

#include "fastdiff/lab.hpp"

int main() {
  const auto results = fastdiff::lab::run_acceptance(1, [](const fastdiff::lab::CriterionResult& r) {
    std::fprintf(stderr, "  finished %d (%.1fs)\n", r.id, r.seconds);
  });
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s  %2d. %s (%.1fs): %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    failed += !r.passed;
  }
  std::printf("%zu of %zu criteria passed\n", results.size() - failed, results.size());
  return failed ? 1 : 0;
}
