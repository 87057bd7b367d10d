#include "polygas/universe.hpp"

#include "polygas/errors.hpp"

namespace polygas {

PolymerUniverse PolymerUniverse::build(const std::vector<std::string>& ids,
                                       const std::vector<std::pair<std::string, std::string>>& incompatible_pairs)
{
    std::unordered_map<std::string, PolymerIndex> index;
    for (PolymerIndex i = 0; i < ids.size(); ++i) {
        if (!index.emplace(ids[i], i).second) {
            throw InvalidArgument("duplicate polymer id '" + ids[i] + "'");
        }
    }
    std::vector<std::pair<PolymerIndex, PolymerIndex>> pairs;
    pairs.reserve(incompatible_pairs.size());
    for (const auto& [a, b] : incompatible_pairs) {
        auto ia = index.find(a);
        auto ib = index.find(b);
        if (ia == index.end()) {
            throw InvalidArgument("unknown polymer id '" + a + "' in incompatibility pair");
        }
        if (ib == index.end()) {
            throw InvalidArgument("unknown polymer id '" + b + "' in incompatibility pair");
        }
        pairs.emplace_back(ia->second, ib->second);
    }
    return from_adjacency(ids, pairs);
}

PolymerUniverse PolymerUniverse::from_adjacency(std::vector<std::string> ids,
                                                const std::vector<std::pair<PolymerIndex, PolymerIndex>>& pairs)
{
    if (ids.size() > kMaxElements) {
        throw ResourceLimit("polymer universe limited to 64 polymers, got " + std::to_string(ids.size()));
    }
    PolymerUniverse u;
    u.ids_ = std::move(ids);
    u.neighbors_.resize(u.ids_.size());
    for (PolymerIndex i = 0; i < u.ids_.size(); ++i) {
        if (!u.index_.emplace(u.ids_[i], i).second) {
            throw InvalidArgument("duplicate polymer id '" + u.ids_[i] + "'");
        }
        u.neighbors_[i].insert(i);
    }
    for (const auto& [a, b] : pairs) {
        if (a >= u.size() || b >= u.size()) {
            throw InvalidArgument("incompatibility pair references polymer outside the universe");
        }
        u.neighbors_[a].insert(b);
        u.neighbors_[b].insert(a);
    }
    return u;
}

PolymerIndex PolymerUniverse::index_of(const std::string& id) const
{
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw InvalidArgument("unknown polymer id '" + id + "'");
    }
    return it->second;
}

PolymerSet PolymerUniverse::set_of(const std::vector<std::string>& ids) const
{
    PolymerSet s;
    for (const auto& id : ids) {
        s.insert(index_of(id));
    }
    return s;
}

PolymerSet PolymerUniverse::neighborhood(PolymerSet family) const
{
    check_subset(family, "neighborhood argument");
    PolymerSet out;
    family.for_each([&](std::size_t g) { out = out | neighbors_[g]; });
    return out;
}

bool PolymerUniverse::is_compatible_family(PolymerSet family) const
{
    bool ok = true;
    family.for_each([&](std::size_t g) {
        if (punctured_neighborhood(g).intersects(family)) {
            ok = false;
        }
    });
    return ok;
}

void PolymerUniverse::check_subset(PolymerSet family, const char* what) const
{
    if (!family.subset_of(all())) {
        throw InvalidArgument(std::string(what) + " references a polymer outside the universe");
    }
}

ActivityMap::ActivityMap(std::vector<Rational> values, std::vector<Rational> radii)
    : values_(std::move(values)), radii_(std::move(radii))
{
    if (values_.size() != radii_.size()) {
        throw InvalidArgument("activity values and radii differ in length");
    }
    for (const auto& r : radii_) {
        if (r < 0) {
            throw InvalidArgument("activity radii must be nonnegative");
        }
    }
}

ActivityMap ActivityMap::from_radii(std::vector<Rational> radii)
{
    auto values = radii;
    return ActivityMap(std::move(values), std::move(radii));
}

ActivityMap ActivityMap::uniform(std::size_t n, const Rational& z, const Rational& rho)
{
    return ActivityMap(std::vector<Rational>(n, z), std::vector<Rational>(n, rho));
}

bool ActivityMap::inside_polydisc() const
{
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (abs(values_[i]) > radii_[i]) {
            return false;
        }
    }
    return true;
}

} // namespace polygas
