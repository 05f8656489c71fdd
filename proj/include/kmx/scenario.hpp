#pragma once

#include <cstdint>
#include <string>

#include "kmx/config.hpp"

namespace kmx {

/// Timing and determinism surface of the gain-term quadrature.
struct BenchReport {
    double seconds_n1 = 0.0;
    double seconds_n2 = 0.0;
    double seconds_nphi_doubled = 0.0;
    double time_ratio_grids = 0.0;       // seconds_n2 / seconds_n1
    double predicted_ratio_grids = 0.0;  // (N2/N1)^6
    double time_ratio_nphi = 0.0;        // doubled / base at N1
    double nodes_per_second_n1 = 0.0;
    std::uint64_t hash_n1 = 0;
    std::uint64_t hash_n1_threads = 0;  // order-fixed mode, bench_threads workers
    bool hashes_match = false;
    int threads = 1;
};
BenchReport bench_collision(const ScenarioConfig& cfg);

/// Executes the configured scenario, writing artifacts under cfg.out_dir.
/// Returns 0 on success, 3 when a march run aborted on non-finite values.
/// Configuration and resource problems surface as exceptions.
int run_scenario(const ScenarioConfig& cfg);

}  // namespace kmx
