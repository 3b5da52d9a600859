#include "folia/reports.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace folia {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string bisequences_csv(const RealizationPlan& plan, unsigned long long seed) {
    std::ostringstream os;
    os << "# window=" << plan.window << " depth=" << plan.depth << " seed=" << seed << "\n";
    os << "index,target,a,b\n";
    const int N = plan.window;
    for (int n = -N; n <= N; ++n) {
        const size_t i = static_cast<size_t>(n + N);
        os << n << "," << plan.targets[i] << "," << plan.a_values[i] << "," << plan.b_values[i] << "\n";
    }
    return os.str();
}

std::string stabilizer_csv(const StabilizerReport& report, unsigned long long seed) {
    std::ostringstream os;
    os << "# root=" << report.root.str() << " length=" << report.length_bound
       << " words=" << report.words_enumerated << " seed=" << seed << "\n";
    os << "word,length,displacement,classification\n";
    for (const auto& entry : report.fixers) {
        const char* cls = entry.cls == FixClass::Predefined ? "predefined" : "numerical-fix";
        os << "\"" << entry.word.str() << "\"," << entry.word.length() << "," << entry.displacement
           << "," << cls << "\n";
    }
    os << "\"(min over displaced words)\",," << report.min_free_displacement << ",free\n";
    return os.str();
}

std::string orbit_csv(const OrbitGraph& graph, unsigned long long seed) {
    std::ostringstream os;
    os << "# root=" << graph.root.str() << " radius=" << graph.radius << " seed=" << seed << "\n";
    os << "point,depth,parent,edge\n";
    for (const auto& node : graph.nodes) {
        os << "\"" << node.point.str() << "\"," << node.depth << "," << node.parent << ",\""
           << (node.parent < 0 ? std::string("-") : node.edge.str()) << "\"\n";
    }
    return os.str();
}

std::string special_points_csv(const std::vector<SpecialPointViolation>& violations, int length_bound,
                               unsigned long long seed) {
    std::ostringstream os;
    os << "# length=" << length_bound << " seed=" << seed << "\n";
    os << "b_index,image,word\n";
    for (const auto& v : violations) {
        os << v.b_index << ",\"" << v.image.str() << "\",\"";
        for (size_t i = 0; i < v.letters.size(); ++i) {
            if (i) os << " ";
            os << v.letters[i].str();
        }
        os << "\"\n";
    }
    return os.str();
}

std::string block_validation_csv(const BlockPair& pair) {
    std::ostringstream os;
    os << "side,boundary,boundary_class,chi_orb,fillings\n";
    for (const Factor side : {Factor::Right, Factor::Left}) {
        const Block& b = pair.block(side);
        os << factor_prefix(side) << ",\"" << b.boundary().str() << "\","
           << tag_name(classify(b.boundary()).tag) << "," << b.orbifold_euler() << ",\"";
        for (size_t i = 0; i < b.fillings().size(); ++i) {
            if (i) os << " ";
            os << b.fillings()[i].generator << ":" << b.fillings()[i].order << ":rot="
               << b.fillings()[i].rotation;
        }
        os << "\"\n";
    }
    return os.str();
}

std::string plan_text(const RealizationPlan& plan) {
    std::ostringstream os;
    os << "realization plan for " << plan.target.name << "\n";
    os << "window " << plan.window << ", depth " << plan.depth << ", root index " << plan.root_index
       << "\n";
    os << "predicted genus " << plan.predicted_genus() << "\n";
    os << "relations:\n";
    for (const auto& rel : plan.relations) {
        os << "  " << factor_prefix(rel.side) << " " << rel.from_index << " -> " << rel.to_index
           << "  word ";
        for (const auto& w : rel.word) os << w.name << (w.exp == 1 ? "" : "^" + std::to_string(w.exp)) << " ";
        os << " k=" << rel.k.get_str() << "\n";
    }
    os << "pairings:\n";
    for (const auto& hp : plan.pairings) {
        os << "  step " << hp.construction_step << " indexes (" << hp.a_from << "," << hp.a_to
           << ") cycle " << hp.cycle_at_root.str() << "\n";
    }
    os << "index partition:\n";
    for (const auto& [step, list] : plan.index_partition) {
        os << "  step " << step << ":";
        for (const int i : list) os << " " << i;
        os << "\n";
    }
    return os.str();
}

std::string orbit_svg(const OrbitGraph& graph, const GluedAction& action,
                      const RealizationPlan& plan) {
    std::ostringstream os;
    const int size = 640;
    const double cx = size / 2.0, cy = size / 2.0, r = size / 2.0 - 40.0;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\">\n";
    os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r
       << "\" fill=\"none\" stroke=\"#333\"/>\n";
    auto place = [&](double theta) {
        const double angle = 2.0 * M_PI * theta - M_PI / 2.0;
        return std::pair<double, double>(cx + r * std::cos(angle), cy + r * std::sin(angle));
    };
    for (const auto& node : graph.nodes) {
        const auto [x, y] = place(node.point.theta());
        os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"1.2\" fill=\"#9aa7b0\"/>\n";
    }
    // Bisequence grid.
    const int N = plan.window;
    for (int n = -N; n <= N; ++n) {
        const auto [x, y] = place(CirclePoint(plan.b_values[static_cast<size_t>(n + N)]).theta());
        os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2.4\" fill=\"#2b6cb0\"/>\n";
    }
    // Certified cycle points, one hue per pairing.
    const char* palette[] = {"#c05621", "#2f855a", "#b83280", "#6b46c1", "#975a16", "#276749"};
    for (size_t i = 0; i < plan.pairings.size(); ++i) {
        std::optional<PredefinedCycle> cycle;
        try {
            cycle = detect_predefined_cycle(action, plan.pairings[i].cycle_at_root, plan.root_index);
        } catch (const WindowExhausted&) {
        }
        if (!cycle) continue;
        for (const auto& pt : cycle->points) {
            const auto [x, y] = place(pt.theta());
            os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3.6\" fill=\"none\" stroke=\""
               << palette[i % 6] << "\" stroke-width=\"1.6\"/>\n";
        }
    }
    const auto [rx, ry] = place(graph.root.theta());
    os << "<circle cx=\"" << rx << "\" cy=\"" << ry << "\" r=\"4.5\" fill=\"#e53e3e\"/>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace folia
