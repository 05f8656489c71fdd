#pragma once

#include <string>
#include <vector>

#include "kmx/diagnostics.hpp"
#include "kmx/grid.hpp"
#include "kmx/lemma_lab.hpp"
#include "kmx/linearized.hpp"
#include "kmx/norms.hpp"
#include "kmx/solver.hpp"

namespace kmx {

/// Field snapshot, bit-exact round trip. Layout (little-endian):
///   magic "KMX1" | u64 N_x | u64 N | f64 R | f64 gamma | f64 t |
///   N_x * N^3 f64 values, x-major, v lexicographic.
void write_snapshot(const std::string& path, const DistributionField& f, double t, double gamma);

struct Snapshot {
    DistributionField field;
    double t = 0.0;
    double gamma = 0.0;
};
/// `slab_length` rebuilds the x-grid when N_x > 1 (the header does not carry it).
Snapshot read_snapshot(const std::string& path, double slab_length = 1.0);

/// Kernel matrix dump: magic "KMXM" | u64 n | u64 N | f64 R | f64 gamma |
/// f64 cb | n*n f64 row-major entries.
void write_kernel_matrix(const std::string& path, const KernelMatrix& K,
                         const CollisionParams& params);
KernelMatrix read_kernel_matrix(const std::string& path);

/// Diagnostics time series. '#'-prefixed echo lines, then a header row, then
/// one row per record: t, excess mass, excess energy, entropy, min F, one
/// column per norm, smallness A/B (blank when not scheduled).
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records,
                           const std::vector<NormSpec>& norms, const std::string& echo);

std::string json_escape(const std::string& s);

/// Report serialization (nlohmann-backed in the implementation).
std::string to_json(const ConstantReport& rep);
std::string to_json(const KernelBoundReport& rep);
std::string to_json(const PicardReport& rep);    // without the trajectory payload
std::string to_json(const ParameterReport& rep);
std::string to_json(const NuGrowthReport& rep);

void write_text(const std::string& path, const std::string& content);

/// FNV-1a over the raw doubles of a value array (bench correctness hash).
std::uint64_t field_hash(std::span<const double> values);

}  // namespace kmx
