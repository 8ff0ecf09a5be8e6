#include "orca/atomphys/species.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "orca/constants.hpp"
#include "orca/errors.hpp"

namespace orca::atomphys {

using nlohmann::json;

const HyperfineLevel& ManifoldData::level(double F) const { return levels[index_of(F)]; }

std::size_t ManifoldData::index_of(double F) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (std::abs(levels[i].F - F) < 1e-9) return i;
    throw DomainError("manifold " + label + " has no level F=" + std::to_string(F));
}

double VaporPressureModel::pressure(double T) const {
    if (!(T > 0)) throw DomainError("vapour pressure: temperature must be positive");
    return std::pow(10.0, a - b / T);
}

double SpeciesRecord::number_density(double T) const { return vapor.pressure(T) / (phys::k_B * T); }

std::size_t SpeciesRecord::state_count() const {
    std::size_t n = 0;
    for (const auto& m : manifolds) n += m.levels.size();
    return n;
}

SpeciesRecord SpeciesRecord::with_scaled_splittings(double factor) const {
    SpeciesRecord out = *this;
    for (auto& m : out.manifolds)
        for (auto& l : m.levels) l.energy_offset *= factor;
    return out;
}

double SpeciesRecord::memory_ground_F() const { return nuclear_spin + manifold(Manifold::Ground).J; }

static bool is_half_integer(double x) { return std::abs(2 * x - std::round(2 * x)) < 1e-12 && x >= 0; }

std::vector<double> hyperfine_F_values(double J, double I) {
    if (!is_half_integer(J) || !is_half_integer(I)) throw DomainError("J and I must be non-negative half-integers");
    std::vector<double> out;
    for (double F = std::abs(J - I); F <= J + I + 1e-9; F += 1.0) out.push_back(F);
    return out;
}

double hyperfine_shift(double F, double J, double I, double A, double B) {
    const double K = F * (F + 1) - I * (I + 1) - J * (J + 1);
    double E = 0.5 * A * K;
    if (I > 0.5 && J > 0.5 && B != 0.0) {
        E += B * (1.5 * K * (K + 1) - 2.0 * I * (I + 1) * J * (J + 1)) /
             (4.0 * I * (2 * I - 1) * J * (2 * J - 1));
    }
    return E;
}

ManifoldData make_manifold(const std::string& label, double J, double I, double A_MHz, double B_MHz,
                           double linewidth_MHz) {
    ManifoldData m;
    m.label = label;
    m.J = J;
    m.A_MHz = A_MHz;
    m.B_MHz = B_MHz;
    m.linewidth = linewidth_MHz * phys::MHz_to_rad;
    for (double F : hyperfine_F_values(J, I))
        m.levels.push_back({F, hyperfine_shift(F, J, I, A_MHz, B_MHz) * phys::MHz_to_rad});
    return m;
}

HyperfineConstants fit_hyperfine_constants(const ManifoldData& m, double I) {
    // normal equations for E_F = A a_F + B b_F
    double saa = 0, sab = 0, sbb = 0, sae = 0, sbe = 0;
    for (const auto& l : m.levels) {
        const double a = hyperfine_shift(l.F, m.J, I, 1.0, 0.0);
        const double b = hyperfine_shift(l.F, m.J, I, 0.0, 1.0);
        const double e = l.energy_offset / phys::MHz_to_rad;
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        sae += a * e;
        sbe += b * e;
    }
    if (sbb < 1e-300) return {sae / saa, 0.0};
    const double det = saa * sbb - sab * sab;
    return {(sae * sbb - sbe * sab) / det, (saa * sbe - sab * sae) / det};
}

void validate(const SpeciesRecord& s) {
    if (!(s.mass > 0)) throw ConfigError(s.name + ": mass must be positive");
    if (!is_half_integer(s.nuclear_spin)) throw ConfigError(s.name + ": nuclear spin must be a half-integer");
    for (int k = 0; k < 3; ++k) {
        const auto& m = s.manifolds[k];
        if (k > 0 && !(m.linewidth > 0)) throw ConfigError(s.name + ": excited manifold " + m.label + " needs a positive linewidth");
        if (m.linewidth < 0) throw ConfigError(s.name + ": negative linewidth");
        const auto Fs = hyperfine_F_values(m.J, s.nuclear_spin);
        if (Fs.size() != m.levels.size()) throw ConfigError(s.name + ": " + m.label + " has a gap in its F ladder");
        for (std::size_t i = 0; i < Fs.size(); ++i)
            if (std::abs(Fs[i] - m.levels[i].F) > 1e-9) throw ConfigError(s.name + ": " + m.label + " F values out of range");
        if (m.levels.size() > 2) {
            const double sgn = m.levels[1].energy_offset - m.levels[0].energy_offset;
            for (std::size_t i = 1; i < m.levels.size(); ++i) {
                const double d = m.levels[i].energy_offset - m.levels[i - 1].energy_offset;
                if (!(d * sgn > 0)) throw ConfigError(s.name + ": " + m.label + " offsets are not strictly ordered");
            }
        }
    }
    for (const Transition* t : {&s.signal, &s.control})
        if (!(t->wavelength > 0) || !(t->reduced_dipole > 0)) throw ConfigError(s.name + ": transition data must be positive");
}

SpeciesRecord species_from_json(const json& j) {
    try {
        SpeciesRecord s;
        s.name = j.at("name").get<std::string>();
        s.mass = j.at("mass_kg").get<double>();
        s.nuclear_spin = j.at("nuclear_spin").get<double>();
        const auto& mj = j.at("manifolds");
        const char* keys[3] = {"ground", "intermediate", "storage"};
        for (int k = 0; k < 3; ++k) {
            const auto& m = mj.at(keys[k]);
            s.manifolds[k] = make_manifold(m.value("label", std::string(keys[k])), m.at("J").get<double>(), s.nuclear_spin,
                                           m.at("A_MHz").get<double>(), m.value("B_MHz", 0.0),
                                           m.at("linewidth_MHz").get<double>());
        }
        const auto& tj = j.at("transitions");
        for (auto [key, t] : {std::pair{"signal", &s.signal}, std::pair{"control", &s.control}}) {
            t->wavelength = tj.at(key).at("wavelength_nm").get<double>() * 1e-9;
            t->reduced_dipole = tj.at(key).at("reduced_dipole_Cm").get<double>();
        }
        const auto& vp = j.at("vapor_pressure");
        s.vapor.a = vp.at("coefficients").at("a").get<double>();
        s.vapor.b = vp.at("coefficients").at("b").get<double>();
        s.vapor.citation = vp.value("citation", std::string());
        s.citations = j.value("citations", std::vector<std::string>{});
        validate(s);
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("species file: ") + e.what());
    }
}

json species_to_json(const SpeciesRecord& s) {
    json j;
    j["name"] = s.name;
    j["mass_kg"] = s.mass;
    j["nuclear_spin"] = s.nuclear_spin;
    const char* keys[3] = {"ground", "intermediate", "storage"};
    for (int k = 0; k < 3; ++k) {
        const auto& m = s.manifolds[k];
        j["manifolds"][keys[k]] = {{"label", m.label}, {"J", m.J}, {"A_MHz", m.A_MHz}, {"B_MHz", m.B_MHz},
                                   {"linewidth_MHz", m.linewidth / phys::MHz_to_rad}};
    }
    j["transitions"]["signal"] = {{"wavelength_nm", s.signal.wavelength * 1e9}, {"reduced_dipole_Cm", s.signal.reduced_dipole}};
    j["transitions"]["control"] = {{"wavelength_nm", s.control.wavelength * 1e9}, {"reduced_dipole_Cm", s.control.reduced_dipole}};
    j["vapor_pressure"] = {{"coefficients", {{"a", s.vapor.a}, {"b", s.vapor.b}}}, {"citation", s.vapor.citation}};
    j["citations"] = s.citations;
    return j;
}

SpeciesRecord load_species(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open species file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("species file " + path.string() + ": " + e.what());
    }
    return species_from_json(j);
}

SpeciesRecord builtin_species(const std::string& key) {
    std::string file;
    if (key == "cs" || key == "cs133") file = "cs133.json";
    else if (key == "rb87" || key == "rb") file = "rb87.json";
    else throw ConfigError("unknown species '" + key + "' (expected cs133 or rb87)");
    return load_species(std::filesystem::path(ORCA_DATA_DIR) / "species" / file);
}

}  // namespace orca::atomphys
