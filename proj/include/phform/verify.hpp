#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace phform {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string summary;
    nlohmann::json details;
};

struct VerifyOptions {
    std::size_t max_agents = 12;  // rank suite checks tournaments on 2..max_agents
    std::uint64_t seed = 42;
    std::size_t trials = 20;      // per sweep scenario
};

// Suite names accepted by run_suite, in execution order.
const std::vector<std::string_view>& suite_names();

// Runs one named suite. Throws std::invalid_argument for unknown names.
SuiteResult run_suite(std::string_view name, const VerifyOptions& options);

// Individual suites.
SuiteResult verify_rank_suite(std::size_t max_agents);
SuiteResult verify_gradient_suite();
SuiteResult verify_force_suite(std::uint64_t seed);
SuiteResult verify_order_suite();
SuiteResult verify_energy_suite();
SuiteResult verify_sweep_suite(std::size_t trials, std::uint64_t seed);

}  // namespace phform
