#include "kmx/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace kmx {

namespace {

struct RawConfig {
    // section -> ordered (key, value) pairs; repeated keys preserved
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

RawConfig read_raw(const std::string& path, std::vector<std::string>& errors) {
    RawConfig raw;
    std::ifstream in(path);
    if (!in) {
        errors.push_back("cannot open config file '" + path + "'");
        return raw;
    }
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        raw.sections[section].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return raw;
}

class Extractor {
public:
    Extractor(const RawConfig& raw, std::vector<std::string>& errors)
        : raw_(raw), errors_(errors) {}

    bool has(const std::string& sec, const std::string& key) const {
        auto it = raw_.sections.find(sec);
        if (it == raw_.sections.end()) return false;
        for (const auto& kv : it->second)
            if (kv.first == key) return true;
        return false;
    }

    std::string get_string(const std::string& sec, const std::string& key,
                           const std::string& def) {
        mark_known(sec, key);
        auto it = raw_.sections.find(sec);
        if (it == raw_.sections.end()) return def;
        for (auto kv = it->second.rbegin(); kv != it->second.rend(); ++kv)
            if (kv->first == key) return kv->second;
        return def;
    }

    double get_double(const std::string& sec, const std::string& key, double def) {
        const std::string s = get_string(sec, key, "");
        if (s.empty()) return def;
        if (s == "inf" || s == "infinity") return kInfExponent;
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            errors_.push_back("[" + sec + "] " + key + ": cannot parse '" + s + "' as a number");
            return def;
        }
    }

    std::int64_t get_int(const std::string& sec, const std::string& key, std::int64_t def) {
        const std::string s = get_string(sec, key, "");
        if (s.empty()) return def;
        try {
            std::size_t pos = 0;
            const std::int64_t v = std::stoll(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            errors_.push_back("[" + sec + "] " + key + ": cannot parse '" + s +
                              "' as an integer");
            return def;
        }
    }

    std::vector<std::string> get_all(const std::string& sec, const std::string& key) {
        mark_known(sec, key);
        std::vector<std::string> out;
        auto it = raw_.sections.find(sec);
        if (it == raw_.sections.end()) return out;
        for (const auto& kv : it->second)
            if (kv.first == key) out.push_back(kv.second);
        return out;
    }

    void require(const std::string& sec, const std::string& key) {
        if (!has(sec, key))
            errors_.push_back("missing required key [" + sec + "] " + key);
    }

    void check_unknown_keys() {
        for (const auto& [sec, kvs] : raw_.sections) {
            for (const auto& kv : kvs) {
                if (!known_.count(sec + "/" + kv.first))
                    errors_.push_back("unknown key [" + sec + "] " + kv.first);
            }
        }
    }

private:
    void mark_known(const std::string& sec, const std::string& key) {
        known_.insert(sec + "/" + key);
    }
    const RawConfig& raw_;
    std::vector<std::string>& errors_;
    std::set<std::string> known_;
};

NormOrder parse_order(const std::string& s, std::vector<std::string>& errors) {
    if (s == "linf_t_lr_v_linf_x") return NormOrder::linf_t_lr_v_linf_x;
    if (s == "lr_v_linf_tx") return NormOrder::lr_v_linf_tx;
    errors.push_back("norm spec: unknown order '" + s +
                     "' (expected linf_t_lr_v_linf_x or lr_v_linf_tx)");
    return NormOrder::lr_v_linf_tx;
}

}  // namespace

RunMode parse_run_mode(const std::string& name) {
    if (name == "march") return RunMode::march;
    if (name == "picard") return RunMode::picard;
    if (name == "lemmas") return RunMode::lemmas;
    if (name == "kernel") return RunMode::kernel;
    if (name == "bench") return RunMode::bench;
    throw ConfigError("unknown run mode '" + name +
                      "' (expected march|picard|lemmas|kernel|bench)");
}

ScenarioConfig parse_config(const std::string& path) {
    std::vector<std::string> errors;
    RawConfig raw = read_raw(path, errors);
    Extractor ex(raw, errors);
    ScenarioConfig cfg;

    ex.require("grid", "R");
    ex.require("grid", "N");
    ex.require("run", "mode");

    cfg.seed = static_cast<std::uint64_t>(ex.get_int("", "seed", 1));
    cfg.extent = ex.get_double("grid", "R", cfg.extent);
    cfg.nodes = static_cast<int>(ex.get_int("grid", "N", cfg.nodes));
    cfg.x_mode = ex.get_string("grid", "mode", cfg.x_mode);
    cfg.slab_length = ex.get_double("grid", "L", cfg.slab_length);
    cfg.x_nodes = static_cast<int>(ex.get_int("grid", "Nx", cfg.x_nodes));

    cfg.params.gamma = ex.get_double("physics", "gamma", cfg.params.gamma);
    cfg.params.cb = ex.get_double("physics", "cb", cfg.params.cb);

    cfg.n_theta = static_cast<int>(ex.get_int("quadrature", "n_theta", cfg.n_theta));
    cfg.n_phi = static_cast<int>(ex.get_int("quadrature", "n_phi", cfg.n_phi));

    const std::string mode_s = ex.get_string("run", "mode", "march");
    try {
        cfg.mode = parse_run_mode(mode_s);
    } catch (const ConfigError& e) {
        errors.push_back(e.what());
    }
    cfg.dt = ex.get_double("run", "dt", cfg.dt);
    cfg.total_time = ex.get_double("run", "T", cfg.total_time);
    cfg.t_star = ex.get_double("run", "t_star", cfg.t_star);
    cfg.tol = ex.get_double("run", "tol", cfg.tol);
    cfg.n_max = static_cast<int>(ex.get_int("run", "n_max", cfg.n_max));
    cfg.scheme = ex.get_string("run", "scheme", cfg.scheme);
    cfg.time_steps = static_cast<int>(ex.get_int("run", "time_steps", cfg.time_steps));

    for (const std::string& line : ex.get_all("norms", "spec")) {
        NormSpec spec;
        std::istringstream is(line);
        std::string tok;
        bool ok = true;
        while (is >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) {
                ok = false;
                break;
            }
            const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
            if (k == "r")
                spec.r = (v == "inf") ? kInfExponent : std::atof(v.c_str());
            else if (k == "l")
                spec.l = std::atof(v.c_str());
            else if (k == "order")
                spec.order = parse_order(v, errors);
            else
                ok = false;
        }
        if (!ok) {
            errors.push_back("norm spec: malformed line '" + line +
                             "' (expected: spec = r=<r> l=<l> order=<order>)");
            continue;
        }
        if (!(spec.r > 1.0)) {
            errors.push_back("norm spec: r = " + std::to_string(spec.r) +
                             " out of range; the weighted spaces require r in (1, inf]");
            continue;
        }
        cfg.norms.push_back(spec);
    }
    if (cfg.norms.empty())
        cfg.norms.push_back(NormSpec{2.0, 3.0, NormOrder::linf_t_lr_v_linf_x});

    const std::string kind = ex.get_string("data", "kind", "zero");
    if (kind == "zero")
        cfg.init.kind = InitKind::zero;
    else if (kind == "gaussian_bump")
        cfg.init.kind = InitKind::gaussian_bump;
    else if (kind == "two_temperature")
        cfg.init.kind = InitKind::two_temperature;
    else if (kind == "random_smooth")
        cfg.init.kind = InitKind::random_smooth;
    else
        errors.push_back("[data] kind: unknown initial data kind '" + kind + "'");
    cfg.init.amplitude = ex.get_double("data", "amplitude", cfg.init.amplitude);
    {
        const std::string c = ex.get_string("data", "center", "");
        if (!c.empty()) {
            std::istringstream is(c);
            if (!(is >> cfg.init.center[0] >> cfg.init.center[1] >> cfg.init.center[2]))
                errors.push_back("[data] center: expected three numbers");
        }
    }
    cfg.init.width = ex.get_double("data", "width", cfg.init.width);
    cfg.init.x_modulation = ex.get_double("data", "x_modulation", cfg.init.x_modulation);
    cfg.init.temp1 = ex.get_double("data", "T1", cfg.init.temp1);
    cfg.init.temp2 = ex.get_double("data", "T2", cfg.init.temp2);
    cfg.init.seed = cfg.seed;

    cfg.out_dir = ex.get_string("output", "dir", cfg.out_dir);
    cfg.snapshot_stride = static_cast<int>(ex.get_int("output", "snapshot_stride", 0));
    cfg.smallness_stride = static_cast<int>(ex.get_int("output", "smallness_stride", 0));

    cfg.lemma_samples = static_cast<int>(ex.get_int("lemmas", "samples", cfg.lemma_samples));
    cfg.lemma_family = ex.get_string("lemmas", "family", cfg.lemma_family);
    cfg.lemma_r = ex.get_double("lemmas", "r", cfg.lemma_r);
    cfg.lemma_l = ex.get_double("lemmas", "l", cfg.lemma_l);
    cfg.lemma_low_r = ex.get_double("lemmas", "low_r", cfg.lemma_low_r);
    cfg.lemma_low_l = ex.get_double("lemmas", "low_l", cfg.lemma_low_l);
    cfg.lemma_n = ex.get_double("lemmas", "n", cfg.lemma_n);
    cfg.lemma_eta = ex.get_double("lemmas", "eta", cfg.lemma_eta);
    cfg.lemma_refine_nodes =
        static_cast<int>(ex.get_int("lemmas", "refine_N", cfg.lemma_refine_nodes));
    cfg.nu_refine_nodes =
        static_cast<int>(ex.get_int("lemmas", "nu_refine_N", cfg.nu_refine_nodes));

    cfg.kernel_nodes = static_cast<int>(ex.get_int("kernel", "N", cfg.kernel_nodes));
    {
        const std::string ls = ex.get_string("kernel", "l_values", "");
        if (!ls.empty()) {
            cfg.kernel_l_values.clear();
            std::istringstream is(ls);
            double v;
            while (is >> v) cfg.kernel_l_values.push_back(v);
            if (cfg.kernel_l_values.empty())
                errors.push_back("[kernel] l_values: expected a list of numbers");
        }
    }
    cfg.kernel_cap = static_cast<std::size_t>(ex.get_int("kernel", "cap", 4096));

    cfg.bench_n1 = static_cast<int>(ex.get_int("bench", "N1", cfg.bench_n1));
    cfg.bench_n2 = static_cast<int>(ex.get_int("bench", "N2", cfg.bench_n2));
    cfg.bench_n_theta = static_cast<int>(ex.get_int("bench", "n_theta", cfg.bench_n_theta));
    cfg.bench_n_phi = static_cast<int>(ex.get_int("bench", "n_phi", cfg.bench_n_phi));
    cfg.bench_threads = static_cast<int>(ex.get_int("bench", "threads", cfg.bench_threads));

    ex.check_unknown_keys();

    // Range validation, all violations reported together.
    if (!(cfg.extent > 0.0)) errors.push_back("[grid] R must be positive");
    if (cfg.nodes < 2) errors.push_back("[grid] N must be at least 2");
    if (cfg.x_mode != "homogeneous" && cfg.x_mode != "slab1d")
        errors.push_back("[grid] mode must be homogeneous or slab1d");
    if (cfg.x_mode == "slab1d" && cfg.x_nodes < 1) errors.push_back("[grid] Nx must be >= 1");
    if (cfg.x_mode == "slab1d" && !(cfg.slab_length > 0.0))
        errors.push_back("[grid] L must be positive");
    if (!(cfg.params.gamma >= 0.0 && cfg.params.gamma <= 1.0))
        errors.push_back("[physics] gamma = " + std::to_string(cfg.params.gamma) +
                         " out of range; hard potentials 0 <= gamma <= 1");
    if (!(cfg.params.cb > 0.0)) errors.push_back("[physics] cb must be positive");
    if (cfg.n_theta < 1 || cfg.n_phi < 1)
        errors.push_back("[quadrature] n_theta and n_phi must be >= 1");
    if (!(cfg.dt > 0.0)) errors.push_back("[run] dt must be positive");
    if (!(cfg.total_time > 0.0)) errors.push_back("[run] T must be positive");
    if (!(cfg.t_star > 0.0)) errors.push_back("[run] t_star must be positive");
    if (!(cfg.tol > 0.0)) errors.push_back("[run] tol must be positive");
    if (cfg.n_max < 1) errors.push_back("[run] n_max must be >= 1");
    if (cfg.scheme != "nu_integrator" && cfg.scheme != "g_integrator")
        errors.push_back("[run] scheme must be nu_integrator or g_integrator");
    if (cfg.time_steps < 1) errors.push_back("[run] time_steps must be >= 1");
    if (cfg.lemma_family != "maxwellian_modulated" && cfg.lemma_family != "compact_bump" &&
        cfg.lemma_family != "random_positive")
        errors.push_back("[lemmas] family must be one of maxwellian_modulated, compact_bump, "
                         "random_positive");

    if (!errors.empty()) {
        std::string msg = "configuration errors (" + std::to_string(errors.size()) + "):";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }

    cfg.param_report =
        validate_parameters(cfg.norms[0].r, cfg.norms[0].l, cfg.params.gamma);
    return cfg;
}

namespace {
std::string fmt(double v) {
    if (v == kInfExponent) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace

std::string echo_config(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "seed = " << cfg.seed << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "deterministic = " << (cfg.deterministic ? 1 : 0) << "\n";
    os << "[grid]\nR = " << fmt(cfg.extent) << "\nN = " << cfg.nodes << "\nmode = " << cfg.x_mode
       << "\nL = " << fmt(cfg.slab_length) << "\nNx = " << cfg.x_nodes << "\n";
    os << "[physics]\ngamma = " << fmt(cfg.params.gamma) << "\ncb = " << fmt(cfg.params.cb)
       << "\n";
    os << "[quadrature]\nn_theta = " << cfg.n_theta << "\nn_phi = " << cfg.n_phi << "\n";
    os << "[run]\nmode = ";
    switch (cfg.mode) {
        case RunMode::march: os << "march"; break;
        case RunMode::picard: os << "picard"; break;
        case RunMode::lemmas: os << "lemmas"; break;
        case RunMode::kernel: os << "kernel"; break;
        case RunMode::bench: os << "bench"; break;
    }
    os << "\ndt = " << fmt(cfg.dt) << "\nT = " << fmt(cfg.total_time)
       << "\nt_star = " << fmt(cfg.t_star) << "\ntol = " << fmt(cfg.tol)
       << "\nn_max = " << cfg.n_max << "\nscheme = " << cfg.scheme
       << "\ntime_steps = " << cfg.time_steps << "\n";
    os << "[norms]\n";
    for (const auto& s : cfg.norms) {
        os << "spec = r=" << (s.r == kInfExponent ? std::string("inf") : fmt(s.r))
           << " l=" << fmt(s.l) << " order="
           << (s.order == NormOrder::linf_t_lr_v_linf_x ? "linf_t_lr_v_linf_x" : "lr_v_linf_tx")
           << "\n";
    }
    os << "[data]\nkind = ";
    switch (cfg.init.kind) {
        case InitKind::zero: os << "zero"; break;
        case InitKind::gaussian_bump: os << "gaussian_bump"; break;
        case InitKind::two_temperature: os << "two_temperature"; break;
        case InitKind::random_smooth: os << "random_smooth"; break;
    }
    os << "\namplitude = " << fmt(cfg.init.amplitude) << "\ncenter = " << fmt(cfg.init.center[0])
       << " " << fmt(cfg.init.center[1]) << " " << fmt(cfg.init.center[2])
       << "\nwidth = " << fmt(cfg.init.width) << "\nx_modulation = " << fmt(cfg.init.x_modulation)
       << "\nT1 = " << fmt(cfg.init.temp1) << "\nT2 = " << fmt(cfg.init.temp2) << "\n";
    os << "[output]\ndir = " << cfg.out_dir << "\nsnapshot_stride = " << cfg.snapshot_stride
       << "\nsmallness_stride = " << cfg.smallness_stride << "\n";
    os << "[lemmas]\nsamples = " << cfg.lemma_samples << "\nfamily = " << cfg.lemma_family
       << "\nr = " << fmt(cfg.lemma_r) << "\nl = " << fmt(cfg.lemma_l)
       << "\nlow_r = " << fmt(cfg.lemma_low_r) << "\nlow_l = " << fmt(cfg.lemma_low_l)
       << "\nn = " << fmt(cfg.lemma_n) << "\neta = " << fmt(cfg.lemma_eta)
       << "\nrefine_N = " << cfg.lemma_refine_nodes << "\nnu_refine_N = " << cfg.nu_refine_nodes
       << "\n";
    os << "[kernel]\nN = " << cfg.kernel_nodes << "\nl_values =";
    for (double l : cfg.kernel_l_values) os << " " << fmt(l);
    os << "\ncap = " << cfg.kernel_cap << "\n";
    os << "[bench]\nN1 = " << cfg.bench_n1 << "\nN2 = " << cfg.bench_n2
       << "\nn_theta = " << cfg.bench_n_theta << "\nn_phi = " << cfg.bench_n_phi
       << "\nthreads = " << cfg.bench_threads << "\n";
    return os.str();
}

}  // namespace kmx
