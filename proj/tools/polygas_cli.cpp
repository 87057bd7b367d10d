#include "polygas/errors.hpp"
#include "polygas/model.hpp"
#include "polygas/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct Flags {
    std::string model;
    std::string out = "out";
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_order;
    std::optional<int> ks_steps;
    std::string kind;
};

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--model", f.model, "Model file (TOML, or JSON by extension)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
    sub->add_option("--mode", f.mode, "Arithmetic: exact or float")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--seed", f.seed, "Seed for random draws");
    sub->add_option("--max-order", f.max_order, "Highest cluster-expansion order")->check(CLI::Range(0, 64));
    sub->add_option("--ks-steps", f.ks_steps, "Kirkwood-Salzburg iterations")->check(CLI::Range(0, 100000));
}

int dispatch(const std::string& command, const Flags& f)
{
    polygas::RunOptions opt;
    try {
        if (!f.mode.empty()) {
            opt.mode = polygas::parse_mode(f.mode);
        }
        if (!f.kind.empty()) {
            opt.kind = polygas::parse_criterion_kind(f.kind);
        }
        opt.seed = f.seed;
        opt.max_order = f.max_order;
        opt.ks_steps = f.ks_steps;
        opt.model_path = f.model;
        const polygas::ModelSpec spec = polygas::load_model(f.model);
        return polygas::run(command, spec, opt, f.out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int generate(const polygas::GeneratorParams& params, const std::string& path)
{
    try {
        const std::string text = polygas::save_model(polygas::generate_model(params));
        if (path.empty() || path == "-") {
            std::cout << text;
            return 0;
        }
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) {
            throw polygas::Error("cannot write '" + path + "'");
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Polymer gas cluster-expansion harness"};
    app.require_subcommand(1);

    Flags flags;
    std::string chosen;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"xi", "Partition function, reduced correlations and Mayer partial sums"},
        {"theta", "Pinned series Theta and Pi, signed and at the radii"},
        {"criteria", "Convergence criteria margins"},
        {"bounds", "Criterion bounds next to the exact majorants"},
        {"ks-iterate", "Positive Kirkwood-Salzburg iteration from the factorized start"},
        {"neumann", "Neumann partial sums of the Kirkwood-Salzburg operator"},
        {"verify-identities", "Residuals of the exact recursions"},
        {"radius-opt", "Optimized uniform radius per criterion"},
        {"compare", "All criteria side by side with the implication chain"},
        {"run", "Every command listed in the model's [run] section"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, flags);
        if (name == "radius-opt" || name == "criteria") {
            sub->add_option("--kind", flags.kind, "Criterion: KP, D, FP, ExtGK, GK-strict, GK-contraction");
        }
        sub->callback([&chosen, n = name] { chosen = n; });
    }

    polygas::GeneratorParams gen;
    std::string gen_out;
    CLI::App* g = app.add_subcommand("generate", "Write a generated model file");
    g->add_option("family", gen.family, "path, cycle, grid, subsets-on-interval, isolated, triangle")->required();
    g->add_option("--n", gen.n, "Size");
    g->add_option("--width", gen.w, "Grid width");
    g->add_option("--height", gen.h, "Grid height");
    g->add_option("--k", gen.k, "Longest interval");
    g->add_option("-o,--output", gen_out, "Destination file; stdout when omitted");
    g->callback([&chosen] { chosen = "generate"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (chosen == "generate") {
        return generate(gen, gen_out);
    }
    return dispatch(chosen, flags);
}
