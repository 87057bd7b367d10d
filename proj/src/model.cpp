#include "polygas/model.hpp"

#include "polygas/errors.hpp"

#include <json.hpp>
#include <toml.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace polygas {

namespace {

constexpr std::size_t kExactModeMaxPolymers = 12;
constexpr std::size_t kMaxSingleSiteGenerator = 24;
constexpr std::size_t kMaxSubsetGeneratorSites = 16;
constexpr const char* kEdgeRule = "ext-gk-edge";

[[noreturn]] void schema_error(const std::string& field, const std::string& what)
{
    throw ParseError("schema: " + field + ": " + what);
}

Rational node_rational(const toml::node& node, const std::string& field)
{
    if (auto i = node.value_exact<std::int64_t>()) {
        return Rational(static_cast<long>(*i));
    }
    if (node.is_floating_point()) {
        return rational_from_double(*node.value<double>());
    }
    if (auto s = node.value_exact<std::string>()) {
        try {
            return parse_rational(*s);
        } catch (const Error&) {
            schema_error(field, "'" + *s + "' is not a number");
        }
    }
    schema_error(field, "expected a number");
}

std::string node_string(const toml::node& node, const std::string& field)
{
    if (auto s = node.value_exact<std::string>()) {
        return *s;
    }
    if (auto i = node.value_exact<std::int64_t>()) {
        return std::to_string(*i);
    }
    schema_error(field, "expected a string");
}

std::vector<std::string> string_list(const toml::node& node, const std::string& field)
{
    const auto* arr = node.as_array();
    if (arr == nullptr) {
        schema_error(field, "expected an array");
    }
    std::vector<std::string> out;
    for (const auto& el : *arr) {
        out.push_back(node_string(el, field));
    }
    return out;
}

std::size_t size_param(const toml::table& t, const char* key, const std::string& field)
{
    const auto* n = t.get(key);
    if (n == nullptr) {
        return 0;
    }
    auto v = n->value_exact<std::int64_t>();
    if (!v || *v < 0) {
        schema_error(field + "." + key, "expected a nonnegative integer");
    }
    return static_cast<std::size_t>(*v);
}

/// Values for `ids`, from a uniform scalar or a table keyed by id.
std::vector<Rational> per_element(const toml::node& node, const std::vector<std::string>& ids,
                                  const std::string& field)
{
    if (const auto* t = node.as_table()) {
        std::map<std::string, Rational> given;
        for (auto&& [key, value] : *t) {
            const std::string k(key.str());
            if (std::find(ids.begin(), ids.end(), k) == ids.end()) {
                schema_error(field, "unknown element '" + k + "'");
            }
            given[k] = node_rational(value, field + "." + k);
        }
        std::vector<Rational> out;
        for (const auto& id : ids) {
            auto it = given.find(id);
            if (it == given.end()) {
                schema_error(field, "no value for '" + id + "'");
            }
            out.push_back(it->second);
        }
        return out;
    }
    return std::vector<Rational>(ids.size(), node_rational(node, field));
}

void check_known_keys(const toml::table& t, std::initializer_list<const char*> keys, const std::string& field)
{
    for (auto&& [key, value] : t) {
        bool known = false;
        for (const char* k : keys) {
            known = known || key.str() == k;
        }
        if (!known) {
            schema_error(field, "unknown key '" + std::string(key.str()) + "'");
        }
    }
}

toml::table json_to_table(const nlohmann::json& j, const std::string& field);

toml::array json_to_array(const nlohmann::json& j, const std::string& field)
{
    toml::array arr;
    for (const auto& el : j) {
        if (el.is_object()) {
            arr.push_back(json_to_table(el, field));
        } else if (el.is_array()) {
            arr.push_back(json_to_array(el, field));
        } else if (el.is_string()) {
            arr.push_back(el.get<std::string>());
        } else if (el.is_number_integer()) {
            arr.push_back(el.get<std::int64_t>());
        } else if (el.is_number()) {
            arr.push_back(el.get<double>());
        } else if (el.is_boolean()) {
            arr.push_back(el.get<bool>());
        } else {
            schema_error(field, "null is not allowed");
        }
    }
    return arr;
}

toml::table json_to_table(const nlohmann::json& j, const std::string& field)
{
    toml::table t;
    for (const auto& [key, el] : j.items()) {
        const std::string f = field.empty() ? key : field + "." + key;
        if (el.is_object()) {
            t.insert(key, json_to_table(el, f));
        } else if (el.is_array()) {
            t.insert(key, json_to_array(el, f));
        } else if (el.is_string()) {
            t.insert(key, el.get<std::string>());
        } else if (el.is_number_integer()) {
            t.insert(key, el.get<std::int64_t>());
        } else if (el.is_number()) {
            t.insert(key, el.get<double>());
        } else if (el.is_boolean()) {
            t.insert(key, el.get<bool>());
        } else {
            schema_error(f, "null is not allowed");
        }
    }
    return t;
}

WeightForm weight_form_of(const std::string& key)
{
    if (key == "mu") {
        return WeightForm::Mu;
    }
    if (key == "a") {
        return WeightForm::Exponent;
    }
    return WeightForm::Xi;
}

const char* weight_key(WeightForm form)
{
    switch (form) {
    case WeightForm::Mu:
        return "mu";
    case WeightForm::Exponent:
        return "a";
    case WeightForm::Xi:
        return "xi";
    }
    return "mu";
}

WeightFamily family_of(const WeightSpec& w)
{
    std::vector<double> reals;
    for (const auto& v : w.values) {
        reals.push_back(to_double(v));
    }
    if (w.scope == WeightScope::PerSite) {
        return w.form == WeightForm::Exponent ? WeightFamily::site_exponent(reals) : WeightFamily::site_xi(w.values);
    }
    switch (w.form) {
    case WeightForm::Mu:
        return WeightFamily::polymer_mu(w.values);
    case WeightForm::Exponent:
        return WeightFamily::polymer_exponent(reals);
    case WeightForm::Xi:
        return WeightFamily::polymer_xi(w.values);
    }
    return WeightFamily::polymer_mu(w.values);
}

std::vector<std::string> polymer_ids(const ModelSpec& spec)
{
    std::vector<std::string> ids;
    for (const auto& p : spec.polymers) {
        ids.push_back(p.id);
    }
    return ids;
}

void apply_generator(ModelSpec& spec, const toml::table& g)
{
    check_known_keys(g, {"family", "n", "w", "h", "k"}, "generator");
    GeneratorParams p;
    const auto* family = g.get("family");
    if (family == nullptr) {
        schema_error("generator.family", "missing");
    }
    p.family = node_string(*family, "generator.family");
    p.n = size_param(g, "n", "generator");
    p.w = size_param(g, "w", "generator");
    p.h = size_param(g, "h", "generator");
    p.k = size_param(g, "k", "generator");
    const ModelSpec generated = generate_model(p);
    spec.kind = generated.kind;
    spec.sites = generated.sites;
    spec.polymers = generated.polymers;
    spec.pairs = generated.pairs;
}

void parse_universe(ModelSpec& spec, const toml::table& root)
{
    if (const auto* g = root.get_as<toml::table>("generator")) {
        if (root.contains("polymer")) {
            schema_error("generator", "cannot be combined with [[polymer]] entries");
        }
        apply_generator(spec, *g);
        return;
    }
    const auto* u = root.get_as<toml::table>("universe");
    if (u == nullptr) {
        schema_error("universe", "missing (or give a [generator])");
    }
    check_known_keys(*u, {"kind", "sites"}, "universe");
    const auto* kind = u->get("kind");
    if (kind == nullptr) {
        schema_error("universe.kind", "missing");
    }
    const std::string k = node_string(*kind, "universe.kind");
    if (k == "abstract") {
        spec.kind = UniverseKind::Abstract;
    } else if (k == "subset") {
        spec.kind = UniverseKind::Subset;
    } else {
        schema_error("universe.kind", "expected \"abstract\" or \"subset\", got \"" + k + "\"");
    }

    const auto* polymers = root.get_as<toml::array>("polymer");
    if (polymers == nullptr) {
        schema_error("polymer", "at least one [[polymer]] entry is needed");
    }
    for (std::size_t i = 0; i < polymers->size(); ++i) {
        const std::string field = "polymer[" + std::to_string(i) + "]";
        const auto* t = polymers->get(i)->as_table();
        if (t == nullptr) {
            schema_error(field, "expected a table");
        }
        check_known_keys(*t, {"id", "support"}, field);
        PolymerEntry e;
        const auto* id = t->get("id");
        if (id == nullptr) {
            schema_error(field + ".id", "missing");
        }
        e.id = node_string(*id, field + ".id");
        if (const auto* s = t->get("support")) {
            if (spec.kind == UniverseKind::Abstract) {
                schema_error(field + ".support", "only subset universes take supports");
            }
            e.support = string_list(*s, field + ".support");
        } else if (spec.kind == UniverseKind::Subset) {
            schema_error(field + ".support", "missing for polymer '" + e.id + "'");
        }
        spec.polymers.push_back(std::move(e));
    }

    const auto* inc = root.get_as<toml::table>("incompatibility");
    if (spec.kind == UniverseKind::Subset) {
        const auto* sites = u->get("sites");
        if (sites == nullptr) {
            schema_error("universe.sites", "missing for a subset universe");
        }
        spec.sites = string_list(*sites, "universe.sites");
        const std::set<std::string> known(spec.sites.begin(), spec.sites.end());
        for (const auto& p : spec.polymers) {
            for (const auto& s : p.support) {
                if (!known.count(s)) {
                    schema_error("polymer." + p.id + ".support",
                                 "site '" + s + "' of polymer '" + p.id + "' is outside the ground set");
                }
            }
        }
        if (inc != nullptr) {
            check_known_keys(*inc, {"rule"}, "incompatibility");
            if (const auto* rule = inc->get("rule"); rule && node_string(*rule, "incompatibility.rule") != "intersection") {
                schema_error("incompatibility.rule", "subset universes use \"intersection\"");
            }
        }
        return;
    }
    if (u->contains("sites")) {
        schema_error("universe.sites", "only subset universes have sites");
    }
    if (inc != nullptr) {
        check_known_keys(*inc, {"pairs"}, "incompatibility");
        if (const auto* pairs = inc->get_as<toml::array>("pairs")) {
            for (std::size_t i = 0; i < pairs->size(); ++i) {
                const std::string field = "incompatibility.pairs[" + std::to_string(i) + "]";
                const auto pair = string_list(*pairs->get(i), field);
                if (pair.size() != 2) {
                    schema_error(field, "expected two polymer ids");
                }
                spec.pairs.emplace_back(pair[0], pair[1]);
            }
        } else if (inc->contains("pairs")) {
            schema_error("incompatibility.pairs", "expected an array of pairs");
        }
    }
}

void parse_weights(ModelSpec& spec, const toml::table& root)
{
    const auto* w = root.get_as<toml::table>("weights");
    if (w == nullptr) {
        return;
    }
    check_known_keys(*w, {"mu", "a", "xi", "scope"}, "weights");
    const char* key = nullptr;
    for (const char* k : {"mu", "a", "xi"}) {
        if (w->contains(k)) {
            if (key != nullptr) {
                schema_error("weights", "give exactly one of mu, a, xi");
            }
            key = k;
        }
    }
    if (key == nullptr) {
        schema_error("weights", "give one of mu, a, xi");
    }
    WeightSpec ws;
    ws.form = weight_form_of(key);
    const bool subset = spec.kind == UniverseKind::Subset;
    ws.scope = subset && ws.form != WeightForm::Mu ? WeightScope::PerSite : WeightScope::PerPolymer;
    if (const auto* scope = w->get("scope")) {
        const std::string s = node_string(*scope, "weights.scope");
        if (s == "site") {
            ws.scope = WeightScope::PerSite;
        } else if (s == "polymer") {
            ws.scope = WeightScope::PerPolymer;
        } else {
            schema_error("weights.scope", "expected \"site\" or \"polymer\"");
        }
    }
    if (ws.scope == WeightScope::PerSite && !subset) {
        schema_error("weights.scope", "per-site weights need a subset universe");
    }
    if (ws.scope == WeightScope::PerSite && ws.form == WeightForm::Mu) {
        schema_error("weights.mu", "mu is per polymer; use a or xi for sites");
    }
    const auto ids = ws.scope == WeightScope::PerSite ? spec.sites : polymer_ids(spec);
    ws.values = per_element(*w->get(key), ids, std::string("weights.") + key);
    for (const auto& v : ws.values) {
        const bool bad = ws.form == WeightForm::Xi ? v < 1 : v < 0;
        if (bad) {
            schema_error(std::string("weights.") + key,
                         ws.form == WeightForm::Xi ? "xi must be at least 1" : "values must be nonnegative");
        }
    }
    spec.weights = std::move(ws);
}

void parse_activity(ModelSpec& spec, const toml::table& root)
{
    const auto* a = root.get_as<toml::table>("activity");
    spec.rho.assign(spec.polymers.size(), Rational(0));
    if (a == nullptr) {
        return;
    }
    check_known_keys(*a, {"rho", "uniform", "z"}, "activity");
    const auto ids = polymer_ids(spec);
    const auto* rho = a->get("rho");
    const auto* uniform = a->get("uniform");
    if ((rho == nullptr) == (uniform == nullptr)) {
        schema_error("activity", "give exactly one of rho, uniform");
    }
    const toml::node& node = rho != nullptr ? *rho : *uniform;
    const std::string field = rho != nullptr ? "activity.rho" : "activity.uniform";
    if (auto s = node.value_exact<std::string>(); s && *s == kEdgeRule) {
        spec.rho_rule = kEdgeRule;
    } else {
        if (uniform != nullptr && uniform->is_table()) {
            schema_error(field, "expected a single value");
        }
        spec.rho = per_element(node, ids, field);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (spec.rho[i] < 0) {
                schema_error(field, "rho of '" + ids[i] + "' is negative");
            }
        }
    }
    if (const auto* z = a->get("z")) {
        spec.z = per_element(*z, ids, "activity.z");
    }
    spec.has_activity = true;
}

void parse_run(ModelSpec& spec, const toml::table& root)
{
    const auto* r = root.get_as<toml::table>("run");
    if (r == nullptr) {
        return;
    }
    check_known_keys(*r, {"commands", "ks_steps", "tracked", "region", "mode", "seed", "max_order"}, "run");
    if (const auto* c = r->get("commands")) {
        spec.run.commands = string_list(*c, "run.commands");
    }
    if (const auto* k = r->get("ks_steps")) {
        auto v = k->value_exact<std::int64_t>();
        if (!v || *v < 0) {
            schema_error("run.ks_steps", "expected a nonnegative integer");
        }
        spec.run.ks_steps = static_cast<int>(*v);
    }
    if (const auto* m = r->get("max_order")) {
        auto v = m->value_exact<std::int64_t>();
        if (!v || *v < 0) {
            schema_error("run.max_order", "expected a nonnegative integer");
        }
        spec.run.max_order = static_cast<int>(*v);
    }
    if (const auto* t = r->get_as<toml::array>("tracked")) {
        for (std::size_t i = 0; i < t->size(); ++i) {
            spec.run.tracked.push_back(string_list(*t->get(i), "run.tracked[" + std::to_string(i) + "]"));
        }
    }
    if (const auto* g = r->get("region")) {
        spec.run.region = string_list(*g, "run.region");
    }
    if (const auto* m = r->get("mode")) {
        try {
            spec.run.mode = parse_mode(node_string(*m, "run.mode"));
        } catch (const Error& e) {
            schema_error("run.mode", e.what());
        }
    }
    if (const auto* s = r->get("seed")) {
        auto v = s->value_exact<std::int64_t>();
        if (!v || *v < 0) {
            schema_error("run.seed", "expected a nonnegative integer");
        }
        spec.run.seed = static_cast<std::uint64_t>(*v);
    }
}

/// Puts subset polymers in canonical order and fills derived radii.
void finalize(ModelSpec& spec)
{
    if (spec.polymers.empty()) {
        schema_error("polymer", "the universe has no polymers");
    }
    if (spec.kind == UniverseKind::Subset) {
        std::vector<SubsetUniverse::PolymerSpec> specs;
        for (const auto& p : spec.polymers) {
            specs.push_back({p.id, p.support});
        }
        const auto su = SubsetUniverse::build(spec.sites, specs);
        std::map<std::string, std::size_t> old_index;
        for (std::size_t i = 0; i < spec.polymers.size(); ++i) {
            old_index[spec.polymers[i].id] = i;
        }
        auto reorder = [&](std::vector<Rational>& values) {
            std::vector<Rational> out;
            for (const auto& id : su.polymer_ids()) {
                out.push_back(values[old_index.at(id)]);
            }
            values = std::move(out);
        };
        std::vector<PolymerEntry> ordered;
        for (const auto& id : su.polymer_ids()) {
            ordered.push_back(spec.polymers[old_index.at(id)]);
        }
        reorder(spec.rho);
        if (spec.z) {
            reorder(*spec.z);
        }
        if (spec.weights && spec.weights->scope == WeightScope::PerPolymer) {
            reorder(spec.weights->values);
        }
        spec.polymers = std::move(ordered);
    }
    if (spec.rho_rule == kEdgeRule) {
        if (spec.kind != UniverseKind::Subset || !spec.weights || spec.weights->scope != WeightScope::PerSite) {
            schema_error("activity", std::string(kEdgeRule) + " needs a subset universe with per-site weights");
        }
        std::vector<SubsetUniverse::PolymerSpec> specs;
        for (const auto& p : spec.polymers) {
            specs.push_back({p.id, p.support});
        }
        const auto su = SubsetUniverse::build(spec.sites, specs);
        spec.rho = criterion_edge_radii(su, family_of(*spec.weights));
    }
    // Catches unknown ids in pairs, duplicate ids and similar.
    try {
        build_model(spec);
    } catch (const InvalidArgument& e) {
        schema_error("model", e.what());
    }
}

ModelSpec from_table(const toml::table& root)
{
    const auto* schema = root.get("schema");
    if (schema == nullptr) {
        schema_error("schema", "missing (expected schema = 1)");
    }
    if (schema->value_exact<std::int64_t>() != 1) {
        schema_error("schema", "unsupported version (expected 1)");
    }
    check_known_keys(root, {"schema", "universe", "generator", "polymer", "incompatibility", "activity", "weights",
                            "run"},
                     "top level");
    ModelSpec spec;
    parse_universe(spec, root);
    parse_weights(spec, root);
    parse_activity(spec, root);
    parse_run(spec, root);
    finalize(spec);
    return spec;
}

void insert_rational(toml::table& t, const std::string& key, const Rational& q)
{
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) {
        t.insert(key, static_cast<std::int64_t>(q.get_num().get_si()));
    } else {
        t.insert(key, format_rational(q));
    }
}

toml::array string_array(const std::vector<std::string>& xs)
{
    toml::array arr;
    for (const auto& x : xs) {
        arr.push_back(x);
    }
    return arr;
}

toml::table values_table(const std::vector<std::string>& ids, const std::vector<Rational>& values)
{
    toml::table t;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        insert_rational(t, ids[i], values[i]);
    }
    return t;
}

} // namespace

Mode ModelSpec::effective_mode() const
{
    if (run.mode) {
        return *run.mode;
    }
    return polymers.size() <= kExactModeMaxPolymers ? Mode::Exact : Mode::Float;
}

namespace {

/// Schema errors that carry no location get the file name in front.
template <class F>
ModelSpec with_source(const std::string& source, F&& parse)
{
    try {
        return parse();
    } catch (const ParseError& e) {
        const std::string what = e.what();
        if (what.rfind(source, 0) == 0) {
            throw;
        }
        throw ParseError(source + ": " + what);
    }
}

} // namespace

ModelSpec parse_model_toml(const std::string& text, const std::string& source)
{
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
            << e.description();
        throw ParseError(msg.str());
    }
    return with_source(source, [&] { return from_table(root); });
}

ModelSpec parse_model_json(const std::string& text, const std::string& source)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ParseError(source + ": top level must be an object");
    }
    return with_source(source, [&] { return from_table(json_to_table(j, "")); });
}

ModelSpec load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open model file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        return parse_model_json(buf.str(), path);
    }
    return parse_model_toml(buf.str(), path);
}

std::string save_model(const ModelSpec& spec)
{
    toml::table root;
    root.insert("schema", 1);
    toml::table universe;
    universe.insert("kind", spec.kind == UniverseKind::Subset ? "subset" : "abstract");
    if (spec.kind == UniverseKind::Subset) {
        universe.insert("sites", string_array(spec.sites));
    }
    root.insert("universe", std::move(universe));
    toml::array polymers;
    for (const auto& p : spec.polymers) {
        toml::table t;
        t.insert("id", p.id);
        if (spec.kind == UniverseKind::Subset) {
            t.insert("support", string_array(p.support));
        }
        polymers.push_back(std::move(t));
    }
    root.insert("polymer", std::move(polymers));
    toml::table inc;
    if (spec.kind == UniverseKind::Subset) {
        inc.insert("rule", "intersection");
    } else {
        toml::array pairs;
        for (const auto& [a, b] : spec.pairs) {
            pairs.push_back(string_array({a, b}));
        }
        inc.insert("pairs", std::move(pairs));
    }
    root.insert("incompatibility", std::move(inc));
    const auto ids = polymer_ids(spec);
    if (spec.has_activity) {
        toml::table act;
        if (spec.rho_rule.empty()) {
            act.insert("rho", values_table(ids, spec.rho));
        } else {
            act.insert("uniform", spec.rho_rule);
        }
        if (spec.z) {
            act.insert("z", values_table(ids, *spec.z));
        }
        root.insert("activity", std::move(act));
    }
    if (spec.weights) {
        toml::table w;
        const bool per_site = spec.weights->scope == WeightScope::PerSite;
        w.insert("scope", per_site ? "site" : "polymer");
        w.insert(weight_key(spec.weights->form), values_table(per_site ? spec.sites : ids, spec.weights->values));
        root.insert("weights", std::move(w));
    }
    toml::table run;
    run.insert("commands", string_array(spec.run.commands));
    run.insert("ks_steps", spec.run.ks_steps);
    toml::array tracked;
    for (const auto& t : spec.run.tracked) {
        tracked.push_back(string_array(t));
    }
    run.insert("tracked", std::move(tracked));
    run.insert("region", string_array(spec.run.region));
    if (spec.run.mode) {
        run.insert("mode", std::string(to_string(*spec.run.mode)));
    }
    run.insert("seed", static_cast<std::int64_t>(spec.run.seed));
    run.insert("max_order", spec.run.max_order);
    root.insert("run", std::move(run));
    std::ostringstream out;
    out << root << "\n";
    return out.str();
}

ModelSpec generate_model(const GeneratorParams& p)
{
    ModelSpec spec;
    auto single_site = [&](std::size_t count) {
        if (count == 0) {
            throw InvalidArgument("generator '" + p.family + "' needs n >= 1");
        }
        if (count > kMaxSingleSiteGenerator) {
            throw ResourceLimit("generator '" + p.family + "' is limited to 24 polymers");
        }
        for (std::size_t i = 1; i <= count; ++i) {
            spec.polymers.push_back({"v" + std::to_string(i), {}});
        }
    };
    auto link = [&](std::size_t a, std::size_t b) {
        spec.pairs.emplace_back(spec.polymers[a].id, spec.polymers[b].id);
    };
    if (p.family == "path") {
        single_site(p.n);
        for (std::size_t i = 0; i + 1 < p.n; ++i) {
            link(i, i + 1);
        }
    } else if (p.family == "cycle") {
        if (p.n < 3) {
            throw InvalidArgument("cycle generator needs n >= 3");
        }
        single_site(p.n);
        for (std::size_t i = 0; i < p.n; ++i) {
            link(i, (i + 1) % p.n);
        }
    } else if (p.family == "grid") {
        single_site(p.w * p.h);
        for (std::size_t r = 0; r < p.h; ++r) {
            for (std::size_t c = 0; c < p.w; ++c) {
                const std::size_t i = r * p.w + c;
                if (c + 1 < p.w) {
                    link(i, i + 1);
                }
                if (r + 1 < p.h) {
                    link(i, i + p.w);
                }
            }
        }
    } else if (p.family == "isolated") {
        spec.polymers.push_back({"g", {}});
    } else if (p.family == "triangle") {
        spec.polymers = {{"g1", {}}, {"g2", {}}, {"g3", {}}};
        link(0, 1);
        link(1, 2);
        link(0, 2);
    } else if (p.family == "subsets-on-interval") {
        if (p.n == 0 || p.k == 0) {
            throw InvalidArgument("subsets-on-interval needs n >= 1 and k >= 1");
        }
        if (p.n > kMaxSubsetGeneratorSites) {
            throw ResourceLimit("subsets-on-interval is limited to 16 sites");
        }
        spec.kind = UniverseKind::Subset;
        for (std::size_t i = 1; i <= p.n; ++i) {
            spec.sites.push_back(std::to_string(i));
        }
        for (std::size_t len = 1; len <= std::min(p.k, p.n); ++len) {
            for (std::size_t start = 0; start + len <= p.n; ++start) {
                PolymerEntry e;
                for (std::size_t i = start; i < start + len; ++i) {
                    e.id += (e.id.empty() ? "" : "+") + spec.sites[i];
                    e.support.push_back(spec.sites[i]);
                }
                spec.polymers.push_back(std::move(e));
            }
        }
    } else {
        throw InvalidArgument("unknown generator family '" + p.family + "'");
    }
    spec.rho.assign(spec.polymers.size(), Rational(0));
    return spec;
}

const PolymerUniverse& Model::polymers() const
{
    if (abstract_universe) {
        return *abstract_universe;
    }
    return subset_universe->abstract();
}

const WeightFamily& Model::require_weights() const
{
    if (!weights) {
        throw InvalidArgument("this command needs a [weights] section");
    }
    return *weights;
}

void Model::require_activity() const
{
    if (!spec.has_activity) {
        throw InvalidArgument("this command needs an [activity] section");
    }
}

Model build_model(const ModelSpec& spec)
{
    Model m;
    m.spec = spec;
    const auto ids = polymer_ids(spec);
    if (spec.kind == UniverseKind::Subset) {
        std::vector<SubsetUniverse::PolymerSpec> specs;
        for (const auto& p : spec.polymers) {
            specs.push_back({p.id, p.support});
        }
        m.subset_universe = SubsetUniverse::build(spec.sites, specs);
    } else {
        m.abstract_universe = PolymerUniverse::build(ids, spec.pairs);
    }
    std::vector<Rational> rho = spec.rho;
    rho.resize(ids.size(), Rational(0));
    m.activities = spec.z ? ActivityMap(*spec.z, rho) : ActivityMap::from_radii(rho);
    if (spec.weights) {
        m.weights = family_of(*spec.weights);
    }
    m.mode = spec.effective_mode();
    return m;
}

} // namespace polygas
