#pragma once

#include "polygas/numeric.hpp"
#include "polygas/subset_gas.hpp"
#include "polygas/universe.hpp"
#include "polygas/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polygas {

enum class CriterionKind { KP, Dobrushin, FP, GKStrict, ExtGK, GKContraction };
enum class PhiKind { KP, Dobrushin, FP };

enum class BoundKind {
    DoBo,          ///< |Theta_g| <= log(1 + mu_g)
    Lovasz,        ///< |Theta_g| <= -(phi^FP_g - mu_g) log(1 - rho_g)
    GkBo0,         ///< e^{-a}[1 + sup_x sum rho_g e^{|g|}], as displayed
    GkBo0Weighted, ///< e^{-a}[1 + sup_x sum rho_g e^{a|g|}]
    GkBo,          ///< |Theta_x| <= a_x
    Bdo,           ///< |Pi_g| <= phi^D_g
    BPia,          ///< |Pi_g| <= phi^FP_g
    SolutionNorm,  ///< sup_X phi(X) / xi^X <= 1 / (1 - norm)
};

std::string to_string(CriterionKind kind);
std::string to_string(BoundKind kind);
CriterionKind parse_criterion_kind(const std::string& text);

/// Strict kinds need every margin > 0, the others accept 0.
bool is_strict(CriterionKind kind);

template <class T>
T phi_dobrushin(const PolymerUniverse& universe, PolymerIndex polymer, std::span<const T> mu);

/// Xi_{Gamma(g)}(mu); Gamma(g) contains g.
template <class T>
T phi_fp(const PolymerUniverse& universe, PolymerIndex polymer, std::span<const T> mu);

double phi_kp(const PolymerUniverse& universe, PolymerIndex polymer, std::span<const double> mu);

/// KP is always a float; D and FP follow the mode.
GasValue phi_value(const PolymerUniverse& universe, PolymerIndex polymer, const WeightFamily& mu, PhiKind kind,
                   Mode mode);

struct CriterionEntry {
    std::string element;
    GasValue margin;
    bool holds = false;
};

struct BoundEntry {
    BoundKind kind;
    std::string element;
    double value = 0;
    /// The exact majorant |Theta|(rho) or |Pi|(rho) it bounds, when defined.
    std::optional<double> exact;
    /// Set when the criterion fails, or when the quantity has no exact counterpart.
    bool flagged = false;
    std::string note;

    std::optional<double> slack() const
    {
        if (!exact) {
            return std::nullopt;
        }
        return value - *exact;
    }
};

struct CriterionReport {
    CriterionKind kind;
    bool strict = false;
    bool holds = false;
    std::vector<CriterionEntry> entries;
    /// Element attaining the smallest margin.
    std::string worst;
    std::vector<BoundEntry> bounds;
};

/// Abstract gas: KP (weights read as exponents a), Dobrushin and FP (weights
/// mu), GKContraction (norm bound with xi = 1 + mu, margin 1 - norm). GK
/// kinds that need sites raise InvalidArgument.
CriterionReport check_criterion(const PolymerUniverse& universe, const ActivityMap& activities,
                                const WeightFamily& weights, CriterionKind kind, Mode mode);

/// Subset gas. GKStrict and ExtGK need per-site weights (GKStrict uniform).
/// Dobrushin, FP and KP run on the abstract view; per-site weights enter as
/// mu_g = rho_g xi^g.
CriterionReport check_criterion(const SubsetUniverse& universe, const ActivityMap& activities,
                                const WeightFamily& weights, CriterionKind kind, Mode mode);

/// Per-polymer mu implied by per-site weights: mu_g = rho_g xi^g.
std::vector<Rational> factorized_mu(const SubsetUniverse& universe, const ActivityMap& activities,
                                    const WeightFamily& site_weights);

/// Per-polymer bounds for abstract kinds (DoBo, Lovasz, Bdo, BPia).
double bound_value(const PolymerUniverse& universe, PolymerIndex polymer, const ActivityMap& activities,
                   const WeightFamily& mu, BoundKind kind);

/// Per-site bounds for subset kinds (GkBo0, GkBo0Weighted, GkBo).
double bound_value(const SubsetUniverse& universe, std::size_t site, const ActivityMap& activities,
                   const WeightFamily& site_weights, BoundKind kind);

/// Fills report.bounds: the kind's bounds per element, next to the exact
/// majorants over the whole universe when those are defined.
void attach_bounds(CriterionReport& report, const PolymerUniverse& universe, const ActivityMap& activities,
                   const WeightFamily& weights, Mode mode);
void attach_bounds(CriterionReport& report, const SubsetUniverse& universe, const ActivityMap& activities,
                   const WeightFamily& weights, Mode mode);

struct RadiusSearch {
    double lower = 0;
    double upper = 1e6; ///< on mu (D, FP) or on e^a - 1 (KP, ExtGK)
    double tolerance = 1e-10;
};

struct RadiusResult {
    CriterionKind kind;
    double radius = 0;
    /// mu for D and FP, a for KP and ExtGK.
    double argmax = 0;
    bool at_cap = false;
};

/// Largest uniform radius certified by the kind over one scalar weight,
/// found by golden-section search. Needs a model whose elements all look
/// alike to the criterion.
RadiusResult optimize_uniform_weight(const PolymerUniverse& universe, CriterionKind kind,
                                     const RadiusSearch& search = {});
RadiusResult optimize_uniform_weight(const SubsetUniverse& universe, CriterionKind kind,
                                     const RadiusSearch& search = {});

/// Radius function of the kind at one weight value (mu for D/FP, a for KP/ExtGK).
double uniform_radius(const PolymerUniverse& universe, CriterionKind kind, double weight);
double uniform_radius(const SubsetUniverse& universe, CriterionKind kind, double weight);

struct Comparison {
    std::vector<CriterionReport> reports;
    /// KP => D => FP per polymer (and ExtGK at every site of g => FP at g).
    bool chain_consistent = true;
    std::vector<std::string> violations;
};

/// KP is evaluated with a_g = log(mu_g / rho_g), so all kinds share one mu.
Comparison compare_criteria(const PolymerUniverse& universe, const ActivityMap& activities,
                            const WeightFamily& mu, Mode mode);
Comparison compare_criteria(const SubsetUniverse& universe, const ActivityMap& activities,
                            const WeightFamily& weights, Mode mode);

} // namespace polygas
