#include <chrono>
#include <cstring>
#include <string>
#include <vector>

#include "acceptance.hpp"

namespace {

struct Criterion {
  const char* name;
  bool (*run)();
};

const Criterion kCriteria[] = {
    {"radio", acc_radio},           {"aoi", acc_aoi},
    {"oracle", acc_oracle},         {"gradient", acc_gradient},
    {"fedavg", acc_fedavg},         {"overhead", acc_overhead},
    {"determinism", acc_determinism}, {"ablations", acc_ablations},
    {"learning", acc_learning},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) wanted.emplace_back(argv[i]);

  int failures = 0;
  int matched = 0;
  for (const Criterion& c : kCriteria) {
    if (!wanted.empty()) {
      bool hit = false;
      for (const std::string& w : wanted) hit = hit || w == c.name;
      if (!hit) continue;
    }
    matched += 1;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      std::printf("  criterion %s threw: %s\n", c.name, e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.name, secs);
    std::fflush(stdout);
    if (!ok) failures += 1;
  }
  if (matched == 0) {
    std::printf("no such criterion; known:");
    for (const Criterion& c : kCriteria) std::printf(" %s", c.name);
    std::printf("\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
