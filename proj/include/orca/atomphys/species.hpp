#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace orca::atomphys {

enum class Manifold { Ground = 0, Intermediate = 1, Storage = 2 };

struct HyperfineLevel {
    double F = 0.0;
    double energy_offset = 0.0;  // rad/s, relative to the manifold centroid
};

struct ManifoldData {
    std::string label;
    double J = 0.0;
    double A_MHz = 0.0;
    double B_MHz = 0.0;
    double linewidth = 0.0;  // rad/s (natural decay rate of the manifold population)
    std::vector<HyperfineLevel> levels;

    const HyperfineLevel& level(double F) const;
    std::size_t index_of(double F) const;
};

struct Transition {
    double wavelength = 0.0;      // m (vacuum)
    double reduced_dipole = 0.0;  // C m, <J'||d||J> with A = w^3 |d|^2 / (3 pi eps0 hbar c^3 (2J'+1))
};

// log10(P / Pa) = a - b / T over the liquid phase.
struct VaporPressureModel {
    double a = 0.0;
    double b = 0.0;
    std::string citation;

    double pressure(double T) const;
};

struct SpeciesRecord {
    std::string name;
    double mass = 0.0;  // kg
    double nuclear_spin = 0.0;
    std::array<ManifoldData, 3> manifolds;
    Transition signal;   // ground -> intermediate
    Transition control;  // intermediate -> storage
    VaporPressureModel vapor;
    std::vector<std::string> citations;

    const ManifoldData& manifold(Manifold m) const { return manifolds[static_cast<int>(m)]; }
    ManifoldData& manifold(Manifold m) { return manifolds[static_cast<int>(m)]; }

    // Saturated vapour number density at T, m^-3.
    double number_density(double T) const;
    std::size_t state_count() const;
    // Copy with every hyperfine splitting multiplied by `factor` (0 collapses the structure).
    SpeciesRecord with_scaled_splittings(double factor) const;
    // Populated ground level used by the memory (upper ground hyperfine level).
    double memory_ground_F() const;
};

// Allowed F values |J-I| .. J+I.
std::vector<double> hyperfine_F_values(double J, double I);

// Hyperfine shift of level F from the manifold centroid, in the units of A and B.
double hyperfine_shift(double F, double J, double I, double A, double B);

ManifoldData make_manifold(const std::string& label, double J, double I, double A_MHz,
                           double B_MHz, double linewidth_MHz);

struct HyperfineConstants {
    double A_MHz;
    double B_MHz;
};

// Least-squares inversion of level offsets back to A and B.
HyperfineConstants fit_hyperfine_constants(const ManifoldData& m, double I);

void validate(const SpeciesRecord& s);

SpeciesRecord species_from_json(const nlohmann::json& j);
nlohmann::json species_to_json(const SpeciesRecord& s);
SpeciesRecord load_species(const std::filesystem::path& path);

// "cs", "cs133", "rb87" resolve to the shipped data files.
SpeciesRecord builtin_species(const std::string& key);

}  // namespace orca::atomphys
