#pragma once

#include "polygas/numeric.hpp"
#include "polygas/subset_gas.hpp"
#include "polygas/universe.hpp"
#include "polygas/weights.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polygas {

enum class UniverseKind { Abstract, Subset };

struct PolymerEntry {
    std::string id;
    std::vector<std::string> support; // subset universes only

    bool operator==(const PolymerEntry&) const = default;
};

struct WeightSpec {
    WeightScope scope = WeightScope::PerPolymer;
    WeightForm form = WeightForm::Mu;
    /// One per polymer or per site, in model order. Exponents are kept as the
    /// exact decimal they were written with.
    std::vector<Rational> values;

    bool operator==(const WeightSpec&) const = default;
};

struct RunSpec {
    std::vector<std::string> commands;
    int ks_steps = 6;
    std::vector<std::vector<std::string>> tracked;
    /// Empty means the whole universe.
    std::vector<std::string> region;
    std::optional<Mode> mode;
    std::uint64_t seed = 0;
    int max_order = 6;

    bool operator==(const RunSpec&) const = default;
};

/// A validated model file. Polymers are in canonical order (input order for
/// abstract gases; size then site order for subset gases) and every
/// per-element list follows it.
struct ModelSpec {
    UniverseKind kind = UniverseKind::Abstract;
    std::vector<std::string> sites;
    std::vector<PolymerEntry> polymers;
    /// Abstract gases: explicit incompatible pairs (reflexivity implied).
    std::vector<std::pair<std::string, std::string>> pairs;
    bool has_activity = false;
    std::vector<Rational> rho;
    std::optional<std::vector<Rational>> z;
    /// "ext-gk-edge": rho derived from the site weights.
    std::string rho_rule;
    std::optional<WeightSpec> weights;
    RunSpec run;

    bool operator==(const ModelSpec&) const = default;

    Mode effective_mode() const;
};

/// Reads TOML, or JSON when the path ends in ".json".
ModelSpec load_model(const std::string& path);
ModelSpec parse_model_toml(const std::string& text, const std::string& source = "<string>");
ModelSpec parse_model_json(const std::string& text, const std::string& source = "<string>");

/// TOML text that loads back to an equal spec.
std::string save_model(const ModelSpec& spec);

struct GeneratorParams {
    std::string family; ///< path, cycle, grid, subsets-on-interval, isolated, triangle
    std::size_t n = 0;
    std::size_t w = 0;
    std::size_t h = 0;
    std::size_t k = 0;
};

ModelSpec generate_model(const GeneratorParams& params);

/// The runtime objects a spec describes.
struct Model {
    ModelSpec spec;
    std::optional<PolymerUniverse> abstract_universe;
    std::optional<SubsetUniverse> subset_universe;
    ActivityMap activities;
    std::optional<WeightFamily> weights;
    Mode mode = Mode::Exact;

    bool is_subset() const { return subset_universe.has_value(); }
    /// The abstract universe, or the abstract view of the subset gas.
    const PolymerUniverse& polymers() const;
    const WeightFamily& require_weights() const;
    void require_activity() const;
};

Model build_model(const ModelSpec& spec);

} // namespace polygas
