#include "CLI11.hpp"

#include "folia/reports.hpp"

#include <fstream>
#include <iostream>

using namespace folia;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    int radius = -1;
    int length = -1;
    std::string backend;
    unsigned long long seed = 0;
    bool seed_set = false;
};

RunConfig load_with_overrides(const CliOptions& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (opt.radius >= 0) cfg.radius = opt.radius;
    if (opt.length >= 0) cfg.length = opt.length;
    if (!opt.backend.empty()) cfg.backend = parse_backend(opt.backend);
    if (opt.seed_set) cfg.seed = opt.seed;
    cfg.validate();
    return cfg;
}

int cmd_validate(const CliOptions& opt) {
    const RunConfig cfg = load_with_overrides(opt);
    const BlockPair pair = BlockPair::build(cfg.right_block, cfg.left_block);
    std::ostringstream os;
    os << "blocks validated\n";
    os << "  anchor ell = " << pair.anchor().ell().str_fractional() << "\n";
    for (const Factor side : {Factor::Right, Factor::Left}) {
        const Block& b = pair.block(side);
        os << "  " << factor_prefix(side) << ": boundary " << b.boundary().str_fractional()
           << " (parabolic), chi_orb = " << b.orbifold_euler() << ", " << b.fillings().size()
           << " Dehn fillings\n";
    }
    os << "targets:\n";
    for (const auto& t : cfg.targets) {
        const SurfaceInvariants inv = t.predicted_invariants(cfg.depth);
        os << "  " << t.name << ": " << inv.str() << "\n";
    }
    std::cout << os.str();
    write_file(cfg.out_dir / "validation.txt", os.str());
    write_file(cfg.out_dir / "blocks.csv", block_validation_csv(pair));
    return 0;
}

int cmd_realize(const CliOptions& opt) {
    const RunConfig cfg = load_with_overrides(opt);
    const BlockPair pair = BlockPair::build(cfg.right_block, cfg.left_block);
    if (cfg.targets.empty()) {
        std::cerr << "no targets configured\n";
        return 1;
    }
    std::ostringstream summary;
    summary << "realize: " << cfg.targets.size() << " target(s), window " << cfg.window << ", depth "
            << cfg.depth << ", radius " << cfg.radius << ", length " << cfg.length << ", backend "
            << (cfg.backend == FundamentalDomainMap::Backend::PiecewiseLinear ? "pl" : "cubic")
            << ", seed " << cfg.seed << "\n\n";
    bool all_equal = true;
    const CoexistenceReport coex =
        coexistence_run(pair, cfg.targets, cfg.window, cfg.depth, cfg.radius, cfg.length, cfg.backend,
                        static_cast<unsigned>(cfg.seed));
    write_file(cfg.out_dir / "bisequences.csv", bisequences_csv(coex.combined, cfg.seed));
    const GluedAction action =
        assemble_action(pair, coex.combined, cfg.backend, static_cast<unsigned>(cfg.seed));
    for (size_t n = 0; n < coex.reports.size(); ++n) {
        const LeafReport& rep = coex.reports[n];
        summary << rep.str() << "\n";
        all_equal = all_equal && rep.verdict == LeafReport::Verdict::EqualAtDepth;
        const std::string tag = std::to_string(n);
        write_file(cfg.out_dir / ("leaf_report_" + tag + ".txt"), rep.str());
        // Orbit dump and schematic at the target's root.
        std::vector<Letter> gens;
        for (const auto& name : action.context().factor(Factor::Right).names()) {
            gens.push_back(Letter{Factor::Right, false, name, 1});
            gens.push_back(Letter{Factor::Right, false, name, -1});
        }
        const CirclePoint root(action.b_seq().value(rep.root_index));
        const OrbitGraph ball = orbit(action, root, std::min(cfg.radius, 7), gens);
        write_file(cfg.out_dir / ("orbit_" + tag + ".csv"), orbit_csv(ball, cfg.seed));
        RealizationPlan row = coex.combined;
        row.root_index = rep.root_index;
        write_file(cfg.out_dir / ("leaf_" + tag + ".svg"), orbit_svg(ball, action, row));
    }
    write_file(cfg.out_dir / "plan.txt", plan_text(coex.combined));
    summary << "isolation check: " << (coex.isolation_ok ? "pass" : "FAIL") << "\n";
    std::cout << summary.str();
    write_file(cfg.out_dir / "summary.txt", summary.str());
    return all_equal && coex.isolation_ok ? 0 : 2;
}

int cmd_audit(const CliOptions& opt) {
    const RunConfig cfg = load_with_overrides(opt);
    if (!std::filesystem::exists(cfg.out_dir / "plan.txt")) {
        std::cerr << "no realized run directory at " << cfg.out_dir << " (run realize first)\n";
        return 1;
    }
    const BlockPair pair = BlockPair::build(cfg.right_block, cfg.left_block);
    const CoexistenceReport coex =
        coexistence_run(pair, cfg.targets, cfg.window, cfg.depth, cfg.radius, cfg.length, cfg.backend,
                        static_cast<unsigned>(cfg.seed));
    const GluedAction action =
        assemble_action(pair, coex.combined, cfg.backend, static_cast<unsigned>(cfg.seed));
    bool clean = true;
    for (size_t n = 0; n < coex.reports.size(); ++n) {
        const CirclePoint root(action.b_seq().value(coex.reports[n].root_index));
        const StabilizerReport audit = stabilizer_search(action, root, cfg.length, cfg.tolerance);
        write_file(cfg.out_dir / ("stabilizer_" + std::to_string(n) + ".csv"),
                   stabilizer_csv(audit, cfg.seed));
        for (const auto& entry : audit.fixers) {
            if (entry.cls == FixClass::NumericalFix) {
                clean = false;
                std::cout << "numerical fix at root " << root.str() << ": " << entry.word.str()
                          << " (suggest perturb_to_kill near its off-grid cycle rep)\n";
            }
        }
    }
    const int special_length = std::min(cfg.length, 4);
    const auto violations = avoid_special_points_audit(action, special_length);
    write_file(cfg.out_dir / "special_points.csv",
               special_points_csv(violations, special_length, cfg.seed));
    clean = clean && violations.empty();
    std::cout << "stabilizer audit at L=" << cfg.length << ", special-point audit at L="
              << special_length << ": " << (clean ? "clean" : "violations recorded") << "\n";
    return 0;
}

int cmd_report(const CliOptions& opt) {
    const RunConfig cfg = load_with_overrides(opt);
    const auto path = cfg.out_dir / "summary.txt";
    std::ifstream in(path);
    if (!in) {
        std::cerr << "no summary at " << path << " (run realize first)\n";
        return 1;
    }
    std::cout << in.rdbuf();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimal-foliation leaf realization toolkit"};
    app.require_subcommand(1);
    CliOptions opt;
    app.add_option("--config", opt.config_path, "run configuration (JSON)")->required();
    app.add_option("--out", opt.out_dir, "output directory override");
    app.add_option("--radius", opt.radius, "orbit radius override");
    app.add_option("--length", opt.length, "word length override");
    app.add_option("--backend", opt.backend, "interpolant backend: pl | cubic");
    auto* seed_opt = app.add_option("--seed", opt.seed, "random seed override");

    auto* validate = app.add_subcommand("validate", "validate block specs and targets");
    auto* realize = app.add_subcommand("realize", "compile plans, reconstruct leaves, write artifacts");
    auto* audit = app.add_subcommand("audit", "stabilizer and special-point audits of a realized run");
    auto* report = app.add_subcommand("report", "print the summary of a realized run");

    CLI11_PARSE(app, argc, argv);
    opt.seed_set = seed_opt->count() > 0;

    try {
        if (validate->parsed()) return cmd_validate(opt);
        if (realize->parsed()) return cmd_realize(opt);
        if (audit->parsed()) return cmd_audit(opt);
        if (report->parsed()) return cmd_report(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
