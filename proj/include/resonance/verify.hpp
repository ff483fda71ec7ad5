#pragma once

#include <functional>
#include <string>
#include <vector>

namespace resonance {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

using CheckCallback = std::function<void(const CheckResult&)>;

/// Oracle and property checks over the numerical core. The quick suite runs
/// in seconds; `full` adds the sampled-gradient and sweep-level checks.
std::vector<CheckResult> run_verify(bool full, const CheckCallback& on_result = {}, std::size_t workers = 0);

}  // namespace resonance
