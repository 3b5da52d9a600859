#include "folia/config.hpp"

#include "json.hpp"

#include <fstream>

namespace folia {

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in, nullptr, true, true);  // allow comments
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace

FundamentalDomainMap::Backend parse_backend(const std::string& name) {
    if (name == "pl" || name == "piecewise-linear") return FundamentalDomainMap::Backend::PiecewiseLinear;
    if (name == "cubic" || name == "monotone-cubic") return FundamentalDomainMap::Backend::MonotoneCubic;
    throw std::invalid_argument("unknown backend: " + name + " (expected pl or cubic)");
}

OrbifoldSpec load_block_spec(const std::filesystem::path& path) {
    const auto j = read_json(path);
    OrbifoldSpec spec;
    const std::string side = j.value("side", "right");
    if (side == "right")
        spec.side = Factor::Right;
    else if (side == "left")
        spec.side = Factor::Left;
    else
        throw std::runtime_error(path.string() + ": side must be right or left");
    spec.genus = j.value("genus", 0);
    if (!j.contains("generators") || !j["generators"].is_object())
        throw std::runtime_error(path.string() + ": missing generators object");
    for (const auto& [name, literal] : j["generators"].items())
        spec.generators.emplace(name, MoebiusMap::parse(literal.get<std::string>()));
    for (const auto& cone : j.value("cone_points", nlohmann::json::array()))
        spec.cone_points.emplace_back(cone.at(0).get<std::string>(), cone.at(1).get<int>());
    spec.boundary_word = j.value("boundary_word", "");
    spec.orientation_flag = j.value("orientation", true);
    return spec;
}

namespace {

TargetSurface load_target(const nlohmann::json& j, const std::filesystem::path& base) {
    const std::string kind = j.value("kind", "");
    const std::string name = j.value("name", kind);
    if (kind == "plane") return TargetSurface::plane();
    if (kind == "chain") {
        std::optional<long> handles;
        if (j.contains("handles") && !j["handles"].is_null()) handles = j["handles"].get<long>();
        return TargetSurface::chain(handles, name);
    }
    if (kind == "tree") {
        if (j.contains("file")) {
            const std::filesystem::path p = base / j["file"].get<std::string>();
            std::ifstream in(p);
            if (!in) throw std::runtime_error("cannot open tree file " + p.string());
            std::stringstream ss;
            ss << in.rdbuf();
            return TargetSurface::from_tree(ColoredTree::parse(ss.str()), name);
        }
        if (j.contains("line")) {
            const auto& line = j["line"];
            return TargetSurface::from_tree(
                ColoredTree::line(line.value("depth", 6), line.value("color", 0)), name);
        }
        if (j.contains("full_binary")) {
            const auto& fb = j["full_binary"];
            return TargetSurface::from_tree(
                ColoredTree::full_binary(fb.value("depth", 4), fb.value("color", 0)), name);
        }
        throw std::runtime_error("tree target needs file, line or full_binary");
    }
    if (kind == "finite") {
        return TargetSurface::finite_type(SurfaceInvariants::parse(j.value("record", "")), name);
    }
    throw std::runtime_error("unknown target kind: " + kind);
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
    const auto j = read_json(path);
    RunConfig cfg;
    const auto base = path.parent_path();
    if (!j.contains("blocks")) throw std::runtime_error(path.string() + ": missing blocks section");
    cfg.right_block_path = base / j["blocks"].at("right").get<std::string>();
    cfg.left_block_path = base / j["blocks"].at("left").get<std::string>();
    cfg.right_block = load_block_spec(cfg.right_block_path);
    cfg.left_block = load_block_spec(cfg.left_block_path);
    for (const auto& t : j.value("targets", nlohmann::json::array()))
        cfg.targets.push_back(load_target(t, base));
    cfg.window = j.value("window", cfg.window);
    cfg.radius = j.value("radius", cfg.radius);
    cfg.length = j.value("length", cfg.length);
    cfg.depth = j.value("depth", cfg.depth);
    cfg.tolerance = j.value("tolerance", cfg.tolerance);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("backend")) cfg.backend = parse_backend(j["backend"].get<std::string>());
    if (j.contains("out")) cfg.out_dir = base / j["out"].get<std::string>();
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (window < 1 || radius < 0 || length < 1 || depth < 1)
        throw std::invalid_argument("depth parameters must be positive");
    if (tolerance <= 0) throw std::invalid_argument("tolerance must be positive");
}

}  // namespace folia
