#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "orca/cli/commands.hpp"
#include "orca/cli/config.hpp"
#include "orca/cli/output.hpp"
#include "orca/errors.hpp"

using namespace orca;
using nlohmann::json;

namespace {

struct Overrides {
    std::optional<std::string> species;
    bool pumped = false;
    std::optional<double> splittings, storage_linewidth, temperature, tau_max_ns, noise, mu;
    std::optional<int> tau_count, nz, nv;
    std::optional<std::string> memory_noise, execution;
    std::optional<std::int64_t> triggers, stream_triggers;
};

json patch_for(cli::Command c, const Overrides& o, std::optional<std::uint64_t> seed) {
    json p = json::object();
    const bool memory = c == cli::Command::Lifetime || c == cli::Command::Efficiency;
    if (o.species) p["species"] = *o.species;
    if (o.temperature) p["temperature_K"] = *o.temperature;
    if (seed && (c == cli::Command::Counts || c == cli::Command::Absorption)) p["seed"] = *seed;
    if (o.execution) p["execution"] = *o.execution;
    if (memory) {
        if (o.pumped) p["paths"] = "pumped";
        if (o.splittings) p["splitting_scale"] = *o.splittings;
        if (o.storage_linewidth) p["storage_linewidth_scale"] = *o.storage_linewidth;
        if (o.nz) p["grid"]["nz"] = *o.nz;
        if (o.nv) p["grid"]["nv"] = *o.nv;
    }
    if (c == cli::Command::Lifetime && (o.tau_max_ns || o.tau_count))
        p["taus_ns"] = {{"start", 0.0}, {"stop", o.tau_max_ns.value_or(24.0)}, {"count", o.tau_count.value_or(33)}};
    if (c == cli::Command::Counts) {
        if (o.mu) p["source"]["mu"] = *o.mu;
        if (o.triggers) p["triggers"] = *o.triggers;
        if (o.stream_triggers) p["stream_triggers"] = *o.stream_triggers;
        if (o.memory_noise) {
            const auto colon = o.memory_noise->find(':');
            if (colon == std::string::npos) throw ConfigError("--memory-noise expects kind:photons, e.g. thermal:0.01");
            double photons = 0;
            try {
                photons = std::stod(o.memory_noise->substr(colon + 1));
            } catch (const std::exception&) {
                throw ConfigError("--memory-noise: bad photon number '" + o.memory_noise->substr(colon + 1) + "'");
            }
            p["memory"]["noise"] = {{"kind", o.memory_noise->substr(0, colon)}, {"photons", photons}};
        }
    }
    if (c == cli::Command::Absorption && o.noise) p["noise_rms"] = *o.noise;
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orca: Raman memory and heralded-photon statistics simulator"};
    app.set_version_flag("--version", std::string(cli::tool_version()));
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "orca_out";
    std::string format = "csv";
    Overrides o;

    app.add_option("--config", config_path, "JSON config (merged over the defaults)");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--execution", o.execution, "serial or parallel kernels")->check(CLI::IsMember({"serial", "parallel"}));

    auto add_memory_flags = [&](CLI::App* sub) {
        sub->add_option("--species", o.species, "cs, cs133, rb, rb87");
        sub->add_flag("--pumped", o.pumped, "single optically pumped path");
        sub->add_option("--splittings", o.splittings, "scale of the hyperfine splittings");
        sub->add_option("--storage-linewidth", o.storage_linewidth, "scale of the storage-state linewidth");
        sub->add_option("--temperature", o.temperature, "cell temperature, K");
        sub->add_option("--nz", o.nz, "z grid points");
        sub->add_option("--nv", o.nv, "velocity classes");
    };
    auto* lifetime = app.add_subcommand("lifetime", "normalised efficiency against storage time");
    add_memory_flags(lifetime);
    lifetime->add_option("--tau-max-ns", o.tau_max_ns, "last storage time");
    lifetime->add_option("--tau-count", o.tau_count, "number of storage times");
    auto* efficiency = app.add_subcommand("efficiency", "efficiency against control pulse energy");
    add_memory_flags(efficiency);
    auto* counts = app.add_subcommand("counts", "simulated coincidence experiment and its analysis");
    counts->add_option("--mu", o.mu, "mean pair number per pulse");
    counts->add_option("--memory-noise", o.memory_noise, "added read-out noise, kind:photons");
    counts->add_option("--triggers", o.triggers, "trigger frames analysed");
    counts->add_option("--stream-triggers", o.stream_triggers, "trigger frames written as event streams");
    auto* absorption = app.add_subcommand("absorption", "probe transmission spectrum and temperature fit");
    absorption->add_option("--species", o.species, "cs, cs133, rb, rb87");
    absorption->add_option("--temperature", o.temperature, "cell temperature, K");
    absorption->add_option("--noise", o.noise, "rms of added transmission noise");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto command = cli::command_from_string(app.get_subcommands().front()->get_name());
        json user = config_path ? cli::load_config_file(*config_path) : json::object();
        if (!user.is_object()) throw ConfigError("config file must hold a JSON object");
        user.merge_patch(patch_for(command, o, seed));
        const json resolved = cli::resolve_config(command, user);
        cli::OutputSink sink{out_dir, cli::to_string(command), cli::config_hash(resolved),
                             format == "json" ? cli::TableFormat::Json : cli::TableFormat::Csv};
        cli::write_report(sink, "config", {{"config", resolved}});
        const json rep = cli::run_command(command, resolved, sink);
        std::cout << "orca " << cli::tool_version() << ' ' << sink.command << " -> " << sink.dir.string()
                  << " (config_sha256=" << sink.config_hash.substr(0, 12) << ")\n";
        if (rep.contains("fitted_lifetime_s")) std::cout << "fitted_lifetime_s " << rep["fitted_lifetime_s"].dump() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
}
