#include "orca/cli/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "orca/constants.hpp"
#include "orca/errors.hpp"

namespace orca::cli {

std::string to_string(Command c) {
    switch (c) {
        case Command::Lifetime: return "lifetime";
        case Command::Efficiency: return "efficiency";
        case Command::Counts: return "counts";
        case Command::Absorption: return "absorption";
    }
    return "?";
}

Command command_from_string(const std::string& s) {
    if (s == "lifetime") return Command::Lifetime;
    if (s == "efficiency") return Command::Efficiency;
    if (s == "counts") return Command::Counts;
    if (s == "absorption") return Command::Absorption;
    throw ConfigError("unknown command '" + s + "'");
}

namespace {

json memory_defaults() {
    return {
        {"species", "cs133"},
        {"temperature_K", 364.15},
        {"cell_length_m", 0.072},
        {"number_density_m3", nullptr},
        {"paths", "all"},
        {"splitting_scale", 1.0},
        {"storage_linewidth_scale", 1.0},
        {"intermediate_linewidth_scale", 1.0},
        {"calibration", {{"signal_dipole_scale", 0.557}, {"control_dipole_scale", 1.0}}},
        {"schedule",
         {{"detuning_GHz", 6.0},
          {"two_photon_detuning_GHz", 0.0},
          {"signal_fwhm_ps", 540.0},
          {"control_fwhm_ps", 500.0},
          {"waist_um", 300.0},
          {"read_in_energy_nJ", 0.21},
          {"read_out_energy_nJ", 0.97},
          {"storage_time_ns", 3.5},
          {"geometry", "counter"}}},
        {"grid", {{"nz", 41}, {"nv", 64}, {"dt_ps", 2.0}}},
        {"execution", "parallel"},
    };
}

json counts_defaults() {
    const photonstats::PairSourceModel s;
    const photonstats::GateSpec g;
    return {
        {"source",
         {{"mu", 0.005},
          {"eta_i", s.eta_i},
          {"eta_s", s.eta_s},
          {"eta_s_post", s.eta_s_post},
          {"detector_efficiency", s.detector_efficiency},
          {"dark_rate_hz", s.dark_rate_hz},
          {"pulse_rate_hz", s.pulse_rate_hz},
          {"trigger_rate_hz", s.trigger_rate_hz},
          {"n_max", s.n_max},
          {"jitter_ps", s.jitter_ps}}},
        {"memory",
         {{"eta_in", 0.7},
          {"eta_first", 0.1677},
          {"lifetime_ns", 5.4},
          {"storage_delay_ps", 3500},
          {"slots", 8},
          {"noise", {{"kind", "thermal"}, {"photons", 0.0}}}}},
        {"gates",
         {{"idler_center_ps", g.idler_center_ps},
          {"signal_center_ps", g.signal_center_ps},
          {"read_in_width_ps", g.read_in_width_ps},
          {"read_out_offset_ps", g.read_out_offset_ps},
          {"read_out_width_ps", g.read_out_width_ps},
          {"coincidence_window_ps", g.coincidence_window_ps},
          {"arrival_bin_ps", g.arrival_bin_ps},
          {"coincidence_bin_ps", g.coincidence_bin_ps}}},
        {"triggers", 1000000},
        {"stream_triggers", 2000},
        {"block_triggers", 1000},
        {"readout_periods", 3},
        {"budget", {{"eta_s_total", 0.037}}},
        {"seed", 1},
        {"execution", "parallel"},
    };
}

json absorption_defaults() {
    return {
        {"species", "cs133"},
        {"temperature_K", 364.15},
        {"cell_length_m", 0.072},
        {"detuning_GHz", {{"start", -10.0}, {"stop", 16.0}, {"count", 261}}},
        {"probe_offset_GHz", 6.0},
        {"noise_rms", 0.0},
        {"seed", 1},
        {"fit", {{"T_min", 250.0}, {"T_max", 600.0}}},
    };
}

bool same_kind(const json& def, const json& v) {
    if (def.is_null()) return v.is_null() || v.is_number();
    if (def.is_number()) return v.is_number();
    if (def.is_object() && def.contains("start")) return v.is_object() || v.is_array();  // axis
    if (def.is_array()) return v.is_array();
    return def.type() == v.type();
}

void check_keys(const json& def, const json& user, const std::string& where) {
    if (!user.is_object()) throw ConfigError("config: " + (where.empty() ? std::string("root") : where) + " must be an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = where.empty() ? it.key() : where + "." + it.key();
        if (!def.contains(it.key())) throw ConfigError("config: unknown key '" + path + "'");
        const json& d = def.at(it.key());
        if (!same_kind(d, it.value())) throw ConfigError("config: wrong type for '" + path + "'");
        if (d.is_object() && !d.contains("start")) check_keys(d, it.value(), path);
    }
}

double number(const json& c, const char* key) {
    const auto& v = c.at(key);
    if (!v.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(std::string("config: '") + key + "' must be finite");
    return x;
}

std::int64_t integer(const json& c, const char* key) {
    const double x = number(c, key);
    if (x != std::floor(x)) throw ConfigError(std::string("config: '") + key + "' must be an integer");
    return static_cast<std::int64_t>(x);
}

void positive(double x, const char* what) {
    if (!(x > 0)) throw ConfigError(std::string("config: ") + what + " must be > 0");
}

}  // namespace

json default_config(Command c) {
    json d;
    switch (c) {
        case Command::Lifetime:
            d = memory_defaults();
            d["taus_ns"] = {{"start", 0.0}, {"stop", 24.0}, {"count", 33}};
            d["overlay_dt_ps"] = 10.0;
            break;
        case Command::Efficiency:
            d = memory_defaults();
            d["energies_nJ"] = json::array({0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.21, 0.4, 0.6, 0.97, 1.5, 2.0});
            d["low_energy_limit_nJ"] = 0.02;
            break;
        case Command::Counts: d = counts_defaults(); break;
        case Command::Absorption: d = absorption_defaults(); break;
    }
    return d;
}

json load_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    try {
        return json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

std::vector<double> axis(const json& spec, const std::string& name) {
    std::vector<double> out;
    if (spec.is_array()) {
        for (const auto& v : spec) {
            if (!v.is_number()) throw ConfigError("config: '" + name + "' entries must be numbers");
            out.push_back(v.get<double>());
        }
    } else if (spec.is_object()) {
        for (const char* k : {"start", "stop", "count"})
            if (!spec.contains(k)) throw ConfigError("config: '" + name + "' needs start, stop and count");
        const double a = number(spec, "start"), b = number(spec, "stop");
        const auto n = integer(spec, "count");
        if (n < 1) throw ConfigError("config: '" + name + "' count must be >= 1");
        for (std::int64_t i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    } else {
        throw ConfigError("config: '" + name + "' must be a list or {start, stop, count}");
    }
    if (out.empty()) throw ConfigError("config: '" + name + "' is empty");
    return out;
}

mbsolver::MemorySetup memory_setup(const json& c) {
    const auto sp = atomphys::builtin_species(c.at("species").get<std::string>());
    const double T = number(c, "temperature_K");
    const double L = number(c, "cell_length_m");
    positive(T, "temperature_K");
    positive(L, "cell_length_m");
    std::optional<double> n;
    if (!c.at("number_density_m3").is_null()) {
        n = number(c, "number_density_m3");
        positive(*n, "number_density_m3");
    }
    mbsolver::MemorySetup su{sp, atomphys::make_ensemble(sp, T, L, n), {}, {}, {}, mbsolver::Execution::Parallel};
    const auto& g = c.at("grid");
    su.grid.nz = static_cast<int>(integer(g, "nz"));
    su.grid.nv = static_cast<int>(integer(g, "nv"));
    su.grid.dt = number(g, "dt_ps") * 1e-12;
    if (su.grid.nz < 4 || su.grid.nv < 1) throw ConfigError("config: grid needs nz >= 4 and nv >= 1");
    positive(su.grid.dt, "grid.dt_ps");
    const std::string paths = c.at("paths").get<std::string>();
    if (paths == "pumped") su.grid.paths = mbsolver::pumped_path(sp);
    else if (paths != "all") throw ConfigError("config: paths must be 'all' or 'pumped'");
    const auto& cal = c.at("calibration");
    su.calibration.signal_dipole_scale = number(cal, "signal_dipole_scale");
    su.calibration.control_dipole_scale = number(cal, "control_dipole_scale");
    if (su.calibration.signal_dipole_scale < 0 || su.calibration.control_dipole_scale < 0)
        throw ConfigError("config: calibration scales must be >= 0");
    su.options.splitting_scale = number(c, "splitting_scale");
    su.options.storage_linewidth_scale = number(c, "storage_linewidth_scale");
    su.options.intermediate_linewidth_scale = number(c, "intermediate_linewidth_scale");
    if (su.options.splitting_scale < 0 || su.options.storage_linewidth_scale < 0 || su.options.intermediate_linewidth_scale < 0)
        throw ConfigError("config: scale factors must be >= 0");
    const std::string ex = c.at("execution").get<std::string>();
    if (ex == "serial") su.execution = mbsolver::Execution::Serial;
    else if (ex != "parallel") throw ConfigError("config: execution must be 'serial' or 'parallel'");
    return su;
}

mbsolver::ProtocolSchedule memory_schedule(const json& c, const atomphys::SpeciesRecord& species) {
    const auto& s = c.at("schedule");
    auto sch = mbsolver::default_schedule(species);
    sch.detuning = phys::two_pi * 1e9 * number(s, "detuning_GHz");
    sch.two_photon_detuning = phys::two_pi * 1e9 * number(s, "two_photon_detuning_GHz");
    sch.signal.fwhm = number(s, "signal_fwhm_ps") * 1e-12;
    for (auto& p : sch.controls) {
        p.fwhm = number(s, "control_fwhm_ps") * 1e-12;
        p.waist = number(s, "waist_um") * 1e-6;
    }
    sch.controls[0].energy = number(s, "read_in_energy_nJ") * 1e-9;
    sch.controls[1].energy = number(s, "read_out_energy_nJ") * 1e-9;
    const std::string geo = s.at("geometry").get<std::string>();
    if (geo == "co") sch.geometry = mbsolver::Geometry::CoPropagating;
    else if (geo != "counter") throw ConfigError("config: geometry must be 'counter' or 'co'");
    sch = sch.with_storage_time(number(s, "storage_time_ns") * 1e-9);
    try {
        mbsolver::validate(sch);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: schedule: ") + e.what());
    }
    return sch;
}

photonstats::PairSourceModel source_model(const json& c) {
    const auto& j = c.at("source");
    photonstats::PairSourceModel s;
    s.mu = number(j, "mu");
    s.eta_i = number(j, "eta_i");
    s.eta_s = number(j, "eta_s");
    s.eta_s_post = number(j, "eta_s_post");
    for (const char* k : {"detector_efficiency", "dark_rate_hz"})
        if (!j.at(k).is_array() || j.at(k).size() != 3) throw ConfigError(std::string("config: source.") + k + " needs three entries");
    for (int d = 0; d < 3; ++d) {
        s.detector_efficiency[d] = j.at("detector_efficiency").at(d).get<double>();
        s.dark_rate_hz[d] = j.at("dark_rate_hz").at(d).get<double>();
    }
    s.pulse_rate_hz = number(j, "pulse_rate_hz");
    s.trigger_rate_hz = number(j, "trigger_rate_hz");
    s.n_max = static_cast<int>(integer(j, "n_max"));
    s.jitter_ps = number(j, "jitter_ps");
    photonstats::validate(s);
    return s;
}

photonstats::MemoryChannelModel memory_channel(const json& c) {
    const auto& j = c.at("memory");
    auto m = photonstats::memory_from_lifetime(number(j, "eta_in"), number(j, "eta_first"), number(j, "lifetime_ns") * 1e-9,
                                               integer(j, "storage_delay_ps"), static_cast<int>(integer(j, "slots")));
    const auto& n = j.at("noise");
    const std::string kind = n.at("kind").get<std::string>();
    if (kind == "thermal") m.noise_kind = photonstats::NoiseKind::Thermal;
    else if (kind == "poisson") m.noise_kind = photonstats::NoiseKind::Poisson;
    else throw ConfigError("config: memory.noise.kind must be 'thermal' or 'poisson'");
    m.added_noise = number(n, "photons");
    photonstats::validate(m);
    return m;
}

photonstats::GateSpec gate_spec(const json& c) {
    const auto& j = c.at("gates");
    photonstats::GateSpec g;
    g.idler_center_ps = integer(j, "idler_center_ps");
    g.signal_center_ps = integer(j, "signal_center_ps");
    g.read_in_width_ps = integer(j, "read_in_width_ps");
    g.read_out_offset_ps = integer(j, "read_out_offset_ps");
    g.read_out_width_ps = integer(j, "read_out_width_ps");
    g.coincidence_window_ps = integer(j, "coincidence_window_ps");
    g.arrival_bin_ps = integer(j, "arrival_bin_ps");
    g.coincidence_bin_ps = integer(j, "coincidence_bin_ps");
    photonstats::validate(g);
    return g;
}

json resolve_config(Command c, const json& user) {
    const json def = default_config(c);
    if (!user.is_null()) check_keys(def, user, "");
    json r = def;
    if (!user.is_null()) r.merge_patch(user);
    // Build the typed models now so that every value is checked before any computation starts.
    try {
        switch (c) {
            case Command::Lifetime:
            case Command::Efficiency: {
                const auto su = memory_setup(r);
                memory_schedule(r, su.species);
                const auto xs = axis(c == Command::Lifetime ? r.at("taus_ns") : r.at("energies_nJ"),
                                     c == Command::Lifetime ? "taus_ns" : "energies_nJ");
                for (double x : xs)
                    if (x < 0) throw ConfigError("config: axis values must be >= 0");
                if (c == Command::Lifetime) positive(number(r, "overlay_dt_ps"), "overlay_dt_ps");
                else positive(number(r, "low_energy_limit_nJ"), "low_energy_limit_nJ");
                break;
            }
            case Command::Counts: {
                source_model(r);
                memory_channel(r);
                gate_spec(r);
                if (integer(r, "triggers") < 1 || integer(r, "stream_triggers") < 1 || integer(r, "block_triggers") < 1)
                    throw ConfigError("config: trigger counts must be >= 1");
                if (integer(r, "readout_periods") < 1) throw ConfigError("config: readout_periods must be >= 1");
                integer(r, "seed");
                const double tot = number(r.at("budget"), "eta_s_total");
                if (!(tot > 0 && tot <= 1)) throw ConfigError("config: budget.eta_s_total outside (0, 1]");
                const std::string ex = r.at("execution").get<std::string>();
                if (ex != "serial" && ex != "parallel") throw ConfigError("config: execution must be 'serial' or 'parallel'");
                break;
            }
            case Command::Absorption: {
                atomphys::builtin_species(r.at("species").get<std::string>());
                positive(number(r, "temperature_K"), "temperature_K");
                positive(number(r, "cell_length_m"), "cell_length_m");
                if (axis(r.at("detuning_GHz"), "detuning_GHz").size() < 3) throw ConfigError("config: need >= 3 detunings");
                if (number(r, "noise_rms") < 0) throw ConfigError("config: noise_rms must be >= 0");
                integer(r, "seed");
                const auto& f = r.at("fit");
                if (!(number(f, "T_min") > 0 && number(f, "T_max") > number(f, "T_min")))
                    throw ConfigError("config: fit needs 0 < T_min < T_max");
                break;
            }
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return r;
}

std::string config_hash(const json& resolved) {
    const std::string text = resolved.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("SHA-256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

}  // namespace orca::cli
