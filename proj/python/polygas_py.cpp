#include "polygas/criteria.hpp"
#include "polygas/errors.hpp"
#include "polygas/gas_core.hpp"
#include "polygas/model.hpp"
#include "polygas/run.hpp"
#include "polygas/ursell.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace polygas;

namespace {

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

PolymerUniverse make_universe(std::size_t n, const Edges& edges)
{
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back("g" + std::to_string(i));
    }
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) {
            throw InvalidArgument("edge endpoint out of range");
        }
    }
    return PolymerUniverse::from_adjacency(std::move(ids), edges);
}

std::vector<Rational> rationals(const std::vector<std::string>& text)
{
    std::vector<Rational> out;
    for (const auto& t : text) {
        out.push_back(parse_rational(t));
    }
    return out;
}

RunOptions options(const std::string& path, std::optional<std::string> mode, std::optional<std::uint64_t> seed,
                   std::optional<int> max_order, std::optional<int> ks_steps, std::optional<std::string> kind)
{
    RunOptions o;
    o.model_path = path;
    if (mode) {
        o.mode = parse_mode(*mode);
    }
    o.seed = seed;
    o.max_order = max_order;
    o.ks_steps = ks_steps;
    if (kind) {
        o.kind = parse_criterion_kind(*kind);
    }
    return o;
}

py::dict to_dict(const Report& r)
{
    py::dict tables;
    for (const auto& [stem, table] : r.tables) {
        py::dict t;
        t["columns"] = table.columns;
        t["rows"] = table.rows;
        tables[py::str(stem)] = t;
    }
    py::dict out;
    out["command"] = r.command;
    out["mode"] = r.mode;
    out["seed"] = r.seed;
    out["model"] = r.model;
    out["status"] = r.status;
    out["notes"] = r.notes;
    out["tables"] = tables;
    return out;
}

py::dict compute(const std::string& command, const ModelSpec& spec, const RunOptions& o)
{
    const Model model = build_model(spec);
    return to_dict(compute_command(command, model, o));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Exact polymer-gas computations";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<NormalizationFailure>(m, "NormalizationFailure", PyExc_ArithmeticError);
    py::register_exception<DivergenceIndicator>(m, "DivergenceIndicator", PyExc_ArithmeticError);
    py::register_exception<PrecheckFailure>(m, "PrecheckFailure", PyExc_RuntimeError);
    py::register_exception<ResourceLimit>(m, "ResourceLimit", PyExc_RuntimeError);

    m.def("command_names", &command_names);

    m.def(
        "generate",
        [](const std::string& family, std::size_t n, std::size_t width, std::size_t height, std::size_t k) {
            return save_model(generate_model({family, n, width, height, k}));
        },
        py::arg("family"), py::kw_only(), py::arg("n") = 0, py::arg("width") = 0, py::arg("height") = 0,
        py::arg("k") = 0, "Model TOML for a generator family.");

    m.def(
        "compute_file",
        [](const std::string& command, const std::string& path, std::optional<std::string> mode,
           std::optional<std::uint64_t> seed, std::optional<int> max_order, std::optional<int> ks_steps,
           std::optional<std::string> kind) {
            return compute(command, load_model(path), options(path, mode, seed, max_order, ks_steps, kind));
        },
        py::arg("command"), py::arg("path"), py::kw_only(), py::arg("mode") = py::none(), py::arg("seed") = py::none(),
        py::arg("max_order") = py::none(), py::arg("ks_steps") = py::none(), py::arg("kind") = py::none());

    m.def(
        "compute_text",
        [](const std::string& command, const std::string& text, std::optional<std::string> mode,
           std::optional<std::uint64_t> seed, std::optional<int> max_order, std::optional<int> ks_steps,
           std::optional<std::string> kind) {
            return compute(command, parse_model_toml(text),
                           options("<string>", mode, seed, max_order, ks_steps, kind));
        },
        py::arg("command"), py::arg("text"), py::kw_only(), py::arg("mode") = py::none(), py::arg("seed") = py::none(),
        py::arg("max_order") = py::none(), py::arg("ks_steps") = py::none(), py::arg("kind") = py::none());

    m.def(
        "run",
        [](const std::string& command, const std::string& path, const std::filesystem::path& out,
           std::optional<std::string> mode, std::optional<std::uint64_t> seed) {
            return run(command, load_model(path), options(path, mode, seed, {}, {}, {}), out);
        },
        py::arg("command"), py::arg("path"), py::arg("out"), py::kw_only(), py::arg("mode") = py::none(),
        py::arg("seed") = py::none(), "Writes the reports under `out`; returns the exit status.");

    m.def(
        "partition_function",
        [](std::size_t n, const Edges& edges, const std::vector<std::string>& z, const std::string& mode) {
            const auto u = make_universe(n, edges);
            auto values = rationals(z);
            std::vector<Rational> radii;
            for (const auto& v : values) {
                radii.push_back(abs(v));
            }
            return partition_function(u, u.all(), ActivityMap(std::move(values), std::move(radii)), parse_mode(mode))
                .str();
        },
        py::arg("n"), py::arg("edges"), py::arg("z"), py::arg("mode") = "exact");

    m.def(
        "ursell_coefficient",
        [](std::size_t n, const Edges& edges, const std::vector<std::size_t>& tuple) {
            return format_rational(ursell_coefficient(make_universe(n, edges), tuple));
        },
        py::arg("n"), py::arg("edges"), py::arg("tuple"));

    m.def(
        "check_criterion",
        [](std::size_t n, const Edges& edges, const std::vector<std::string>& rho, const std::vector<std::string>& mu,
           const std::string& kind, const std::string& mode) {
            const auto u = make_universe(n, edges);
            const auto rep = check_criterion(u, ActivityMap::from_radii(rationals(rho)),
                                             WeightFamily::polymer_mu(rationals(mu)), parse_criterion_kind(kind),
                                             parse_mode(mode));
            py::dict margins;
            for (const auto& e : rep.entries) {
                margins[py::str(e.element)] = e.margin.str();
            }
            py::dict out;
            out["kind"] = to_string(rep.kind);
            out["holds"] = rep.holds;
            out["strict"] = rep.strict;
            out["worst"] = rep.worst;
            out["margins"] = margins;
            return out;
        },
        py::arg("n"), py::arg("edges"), py::arg("rho"), py::arg("mu"), py::arg("kind"), py::arg("mode") = "exact");

    m.def(
        "optimize_radius",
        [](std::size_t n, const Edges& edges, const std::string& kind) {
            const auto r = optimize_uniform_weight(make_universe(n, edges), parse_criterion_kind(kind));
            py::dict out;
            out["kind"] = to_string(r.kind);
            out["radius"] = r.radius;
            out["argmax"] = r.argmax;
            out["at_cap"] = r.at_cap;
            return out;
        },
        py::arg("n"), py::arg("edges"), py::arg("kind"));
}
