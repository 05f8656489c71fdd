#include "kmx/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace kmx {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts need byte swaps");

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint64_t get_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
double get_f64(std::ifstream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_snapshot(const std::string& path, const DistributionField& f, double t,
                    double gamma) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open snapshot file for writing: " + path);
    out.write("KMX1", 4);
    put_u64(out, static_cast<std::uint64_t>(f.xgrid().nodes()));
    put_u64(out, static_cast<std::uint64_t>(f.vgrid().nodes_per_axis()));
    put_f64(out, f.vgrid().extent());
    put_f64(out, gamma);
    put_f64(out, t);
    const auto vals = f.values();
    out.write(reinterpret_cast<const char*>(vals.data()),
              static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!out) throw ConfigError("short write on snapshot file: " + path);
}

Snapshot read_snapshot(const std::string& path, double slab_length) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open snapshot file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "KMX1", 4) != 0)
        throw ConfigError("bad snapshot magic in " + path);
    const auto nx = static_cast<int>(get_u64(in));
    const auto n = static_cast<int>(get_u64(in));
    const double R = get_f64(in);
    const double gamma = get_f64(in);
    const double t = get_f64(in);
    auto vgrid = build_velocity_grid(R, n);
    auto xgrid = std::make_shared<const SpatialGrid>(
        nx == 1 ? SpatialGrid::homogeneous() : SpatialGrid::slab1d(slab_length, nx));
    std::vector<double> vals(static_cast<std::size_t>(nx) * vgrid->size());
    in.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!in) throw ConfigError("short read on snapshot file: " + path);
    return Snapshot{DistributionField(xgrid, vgrid, std::move(vals)), t, gamma};
}

void write_kernel_matrix(const std::string& path, const KernelMatrix& K,
                         const CollisionParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open kernel matrix file for writing: " + path);
    out.write("KMXM", 4);
    put_u64(out, K.dim());
    put_u64(out, static_cast<std::uint64_t>(K.grid().nodes_per_axis()));
    put_f64(out, K.grid().extent());
    put_f64(out, params.gamma);
    put_f64(out, params.cb);
    for (std::size_t i = 0; i < K.dim(); ++i) {
        const auto row = K.row(i);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) throw ConfigError("short write on kernel matrix file: " + path);
}

KernelMatrix read_kernel_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open kernel matrix file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "KMXM", 4) != 0)
        throw ConfigError("bad kernel matrix magic in " + path);
    const auto dim = get_u64(in);
    const auto n = static_cast<int>(get_u64(in));
    const double R = get_f64(in);
    get_f64(in);  // gamma (informational)
    get_f64(in);  // cb
    auto grid = build_velocity_grid(R, n);
    if (grid->size() != dim) throw ConfigError("kernel matrix header inconsistent in " + path);
    std::vector<double> entries(dim * dim);
    in.read(reinterpret_cast<char*>(entries.data()),
            static_cast<std::streamsize>(entries.size() * sizeof(double)));
    if (!in) throw ConfigError("short read on kernel matrix file: " + path);
    return KernelMatrix(grid, std::move(entries));
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& records,
                           const std::vector<NormSpec>& norms, const std::string& echo) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open CSV file for writing: " + path);
    std::istringstream echo_lines(echo);
    std::string line;
    while (std::getline(echo_lines, line)) out << "# " << line << "\n";
    out << "t,excess_mass,excess_energy,entropy,min_F";
    for (const auto& s : norms) out << ",norm_" << s.label();
    out << ",smallness_A,smallness_B\n";
    for (const auto& r : records) {
        out << format_g17(r.t) << ',' << format_g17(r.excess_mass) << ','
            << format_g17(r.excess_energy) << ',' << format_g17(r.entropy) << ','
            << format_g17(r.min_F);
        for (double v : r.norms) out << ',' << format_g17(v);
        if (r.has_smallness)
            out << ',' << format_g17(r.smallness_a) << ',' << format_g17(r.smallness_b);
        else
            out << ",,";
        out << "\n";
    }
    if (!out) throw ConfigError("short write on CSV file: " + path);
}

std::string json_escape(const std::string& s) {
    return nlohmann::json(s).dump();
}

namespace {

nlohmann::json constant_report_json(const ConstantReport& rep) {
    nlohmann::json j;
    j["inequality"] = rep.inequality;
    j["r"] = rep.r == kInfExponent ? nlohmann::json("inf") : nlohmann::json(rep.r);
    j["l"] = rep.l;
    j["gamma"] = rep.gamma;
    if (rep.n_exponent != 0.0) j["n"] = rep.n_exponent;
    if (rep.eta != 0.0) j["eta"] = rep.eta;
    j["grid_n"] = rep.grid_n;
    j["grid_extent"] = rep.grid_extent;
    j["samples_requested"] = rep.samples_requested;
    j["skipped"] = rep.skipped;
    j["ratios"] = rep.ratios;
    j["max_ratio"] = rep.max_ratio;
    if (rep.c1 != 0.0 || rep.c2 != 0.0) {
        j["c1"] = rep.c1;
        j["c2"] = rep.c2;
    }
    return j;
}

}  // namespace

std::string to_json(const ConstantReport& rep) { return constant_report_json(rep).dump(2); }

std::string to_json(const KernelBoundReport& rep) {
    nlohmann::json j;
    j["l"] = rep.l;
    j["c1"] = rep.c1;
    j["c2"] = rep.c2;
    j["c_joint"] = rep.c_joint;
    j["pointwise_ok"] = rep.pointwise_ok;
    j["near_band_ratio"] = rep.near_band_ratio;
    j["profile_max"] = rep.profile_max;
    j["profile_finite"] = rep.profile_finite;
    j["decay_exponent"] = rep.decay_exponent;
    j["decay_intercept"] = rep.decay_intercept;
    j["decay_ok"] = rep.decay_ok;
    j["profile"] = rep.profile;
    return j.dump(2);
}

std::string to_json(const PicardReport& rep) {
    nlohmann::json j;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    j["non_contraction_reported"] = rep.non_contraction_reported;
    j["distances"] = rep.distances;
    j["ratios"] = rep.ratios;
    j["iterate_norms"] = rep.iterate_norms;
    j["time_steps"] = rep.trajectory.fields.empty() ? 0 : rep.trajectory.fields.size() - 1;
    j["dt"] = rep.trajectory.dt;
    return j.dump(2);
}

std::string to_json(const ParameterReport& rep) {
    nlohmann::json j;
    j["r"] = rep.r == kInfExponent ? nlohmann::json("inf") : nlohmann::json(rep.r);
    j["l"] = rep.l;
    j["gamma"] = rep.gamma;
    j["r_conjugate"] = rep.r_conjugate;
    j["local_threshold"] = rep.local_threshold;
    j["local_ok"] = rep.local_ok;
    j["global_threshold"] = rep.global_threshold;
    j["global_ok"] = rep.global_ok;
    j["low_r_boundary"] = rep.low_r_boundary;
    j["smallness_required"] = rep.smallness_required;
    return j.dump(2);
}

std::string to_json(const NuGrowthReport& rep) {
    nlohmann::json j;
    j["gamma"] = rep.gamma;
    j["grid_n"] = rep.grid_n;
    j["grid_n_refined"] = rep.grid_n_refined;
    j["c_lo"] = rep.c_lo;
    j["c_hi"] = rep.c_hi;
    j["c_lo_refined"] = rep.c_lo_refined;
    j["c_hi_refined"] = rep.c_hi_refined;
    j["drift"] = rep.drift;
    j["stable_within_10pct"] = rep.stable_within_10pct;
    return j.dump(2);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open file for writing: " + path);
    out << content;
    if (!out) throw ConfigError("short write on file: " + path);
}

std::uint64_t field_hash(std::span<const double> values) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace kmx
