#include "polygas/ursell.hpp"

#include "polygas/errors.hpp"

#include <bit>
#include <functional>

namespace polygas {

namespace {

constexpr std::size_t kMaxGraphVertices = 16;
constexpr double kMaxMultisets = 5e6;

bool is_independent(std::span<const std::uint32_t> adjacency, std::uint32_t subset)
{
    for (auto b = subset; b != 0; b &= b - 1) {
        const int i = std::countr_zero(b);
        if (adjacency[static_cast<std::size_t>(i)] & subset & ~(std::uint32_t{1} << i)) {
            return false;
        }
    }
    return true;
}

bool support_connected(const PolymerUniverse& u, PolymerSet support)
{
    if (support.empty()) {
        return true;
    }
    PolymerSet reached = PolymerSet::single(support.front());
    PolymerSet frontier = reached;
    while (!frontier.empty()) {
        PolymerSet next;
        frontier.for_each([&](std::size_t g) { next = next | (u.neighborhood(g) & support); });
        frontier = next - reached;
        reached = reached | next;
    }
    return reached == support;
}

long long tuple_ursell(const PolymerUniverse& u, std::span<const PolymerIndex> tuple)
{
    std::vector<std::uint32_t> adjacency(tuple.size(), 0);
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        for (std::size_t j = i + 1; j < tuple.size(); ++j) {
            if (u.incompatible(tuple[i], tuple[j])) {
                adjacency[i] |= std::uint32_t{1} << j;
                adjacency[j] |= std::uint32_t{1} << i;
            }
        }
    }
    return connected_subgraph_sum(adjacency);
}

double binomial(double n, double k)
{
    double r = 1.0;
    for (double i = 1; i <= k; ++i) {
        r *= (n - k + i) / i;
    }
    return r;
}

template <class T>
std::vector<T> partial_sums(const PolymerUniverse& u, PolymerSet region, std::span<const T> z, int order,
                            const MayerOptions& opt)
{
    const auto members = region.members();
    const bool prefixed = opt.pin == MayerPin::Prefixed;
    const int lowest = prefixed ? 0 : 1;
    std::vector<T> by_order(static_cast<std::size_t>(order) + 1, T(0));
    if (opt.pin == MayerPin::Containing && !region.contains(opt.pinned)) {
        throw InvalidArgument("pinned polymer is not in the region");
    }

    // z^m / m! per member and multiplicity.
    std::vector<std::vector<T>> powers(members.size(), std::vector<T>(static_cast<std::size_t>(order) + 1));
    for (std::size_t i = 0; i < members.size(); ++i) {
        powers[i][0] = T(1);
        for (int m = 1; m <= order; ++m) {
            powers[i][m] = powers[i][m - 1] * z[members[i]] / T(m);
        }
    }

    std::vector<int> mult(members.size(), 0);
    std::vector<PolymerIndex> tuple;
    std::function<void(std::size_t, int)> visit = [&](std::size_t pos, int used) {
        if (pos == members.size()) {
            if (used < lowest) {
                return;
            }
            PolymerSet support;
            tuple.clear();
            if (prefixed) {
                tuple.push_back(opt.pinned);
                support.insert(opt.pinned);
            }
            T weight(1);
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (mult[i] == 0) {
                    continue;
                }
                support.insert(members[i]);
                tuple.insert(tuple.end(), static_cast<std::size_t>(mult[i]), members[i]);
                weight *= powers[i][mult[i]];
            }
            if (opt.pin == MayerPin::Containing && !support.contains(opt.pinned)) {
                return;
            }
            if (weight == 0 || !support_connected(u, support)) {
                return;
            }
            const long long phi = tuple_ursell(u, tuple);
            if (phi != 0) {
                by_order[static_cast<std::size_t>(used)] += T(static_cast<long>(phi)) * weight;
            }
            return;
        }
        for (int m = 0; used + m <= order; ++m) {
            mult[pos] = m;
            visit(pos + 1, used + m);
        }
        mult[pos] = 0;
    };
    visit(0, 0);

    std::vector<T> sums;
    T running(0);
    for (int n = lowest; n <= order; ++n) {
        running += by_order[static_cast<std::size_t>(n)];
        sums.push_back(running);
    }
    return sums;
}

} // namespace

long long connected_subgraph_sum(std::span<const std::uint32_t> adjacency)
{
    const std::size_t n = adjacency.size();
    if (n == 0) {
        return 0;
    }
    if (n > kMaxGraphVertices) {
        throw ResourceLimit("connected subgraph sum limited to 16 vertices");
    }
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    std::vector<long long> connected(std::size_t{full} + 1, 0);
    std::vector<signed char> empty_graph(std::size_t{full} + 1, 0);
    for (std::uint32_t s = 0; s <= full; ++s) {
        empty_graph[s] = is_independent(adjacency, s) ? 1 : 0;
    }
    // Sum over all spanning subgraphs of S of (-1)^|E| is 1 when S spans no
    // edge and 0 otherwise; split off the component of min(S).
    for (std::uint32_t s = 1; s <= full; ++s) {
        const std::uint32_t low = s & (~s + 1);
        const std::uint32_t rest = s ^ low;
        long long value = empty_graph[s];
        // Proper subsets u of rest: component T = low | u, T != S.
        for (std::uint32_t u = (rest - 1) & rest;; u = (u - 1) & rest) {
            if (u != rest && empty_graph[rest ^ u]) {
                value -= connected[low | u];
            }
            if (u == 0) {
                break;
            }
        }
        connected[s] = value;
    }
    return connected[full];
}

Rational ursell_coefficient(const PolymerUniverse& universe, std::span<const PolymerIndex> tuple, int max_order)
{
    if (tuple.empty()) {
        throw InvalidArgument("ursell coefficient needs a nonempty tuple");
    }
    if (static_cast<int>(tuple.size()) > max_order) {
        throw ResourceLimit("ursell coefficient order " + std::to_string(tuple.size()) + " exceeds the cap " +
                            std::to_string(max_order));
    }
    for (auto g : tuple) {
        if (g >= universe.size()) {
            throw InvalidArgument("ursell tuple references a polymer outside the universe");
        }
    }
    return Rational(static_cast<long>(tuple_ursell(universe, tuple)));
}

std::vector<GasValue> mayer_partial_sums(const PolymerUniverse& universe, PolymerSet region,
                                         const ActivityMap& activities, int order, Mode mode,
                                         const MayerOptions& options)
{
    universe.check_subset(region, "region");
    if (order < 0) {
        throw InvalidArgument("mayer order must be nonnegative");
    }
    if (order > options.max_order) {
        throw ResourceLimit("mayer order " + std::to_string(order) + " exceeds the cap " +
                            std::to_string(options.max_order));
    }
    if (binomial(static_cast<double>(region.size() + static_cast<std::size_t>(order)), order) > kMaxMultisets) {
        throw ResourceLimit("mayer enumeration too large for this region and order");
    }
    std::vector<GasValue> out;
    if (mode == Mode::Exact) {
        const auto z = activities.values_as<Rational>();
        for (auto& v : partial_sums<Rational>(universe, region, z, order, options)) {
            out.emplace_back(std::move(v));
        }
    } else {
        const auto z = activities.values_as<double>();
        for (double v : partial_sums<double>(universe, region, z, order, options)) {
            out.emplace_back(v);
        }
    }
    return out;
}

GasValue mayer_partial_sum(const PolymerUniverse& universe, PolymerSet region, const ActivityMap& activities,
                           int order, Mode mode, const MayerOptions& options)
{
    auto sums = mayer_partial_sums(universe, region, activities, order, mode, options);
    if (sums.empty()) {
        return mode == Mode::Exact ? GasValue(Rational(0)) : GasValue(0.0);
    }
    return sums.back();
}

} // namespace polygas
