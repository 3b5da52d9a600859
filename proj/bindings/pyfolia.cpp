#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "folia/config.hpp"

namespace py = pybind11;
using namespace folia;

namespace {

std::shared_ptr<BlockPair> make_handle_pair() {
    auto spec = [](Factor side) {
        OrbifoldSpec s;
        s.side = side;
        s.genus = 1;
        s.generators.emplace("p", MoebiusMap::parse("[[1,-1],[-1,2]]"));
        s.generators.emplace("q", MoebiusMap::parse("[[1,1],[1,2]]"));
        s.boundary_word = side == Factor::Right ? "p^-1 q^-1 p q" : "q^-1 p^-1 q p";
        return s;
    };
    return std::make_shared<BlockPair>(BlockPair::build(spec(Factor::Right), spec(Factor::Left)));
}

py::dict classify_dict(const MoebiusMap& m) {
    const MapClass cls = classify(m);
    py::dict out;
    out["tag"] = tag_name(cls.tag);
    if (cls.elliptic_order)
        out["order"] = *cls.elliptic_order;
    else
        out["order"] = py::none();
    py::list fixed;
    for (const auto& fp : cls.fixed_points) fixed.append(fp.str());
    out["fixed_points"] = fixed;
    return out;
}

py::dict report_dict(const LeafReport& rep) {
    py::dict out;
    out["target"] = rep.target_name;
    out["verdict"] = verdict_name(rep.verdict);
    out["predicted_genus"] = rep.predicted_genus;
    out["certified_genus"] = rep.certified_genus;
    out["orbit_points"] = rep.orbit_points;
    out["boundary_components"] = rep.boundary_components;
    out["certified_words"] = rep.certified_words.size();
    out["numerical_fixes"] = rep.numerical_fixes.size();
    out["perturb_rounds"] = rep.perturb_rounds;
    return out;
}

TargetSurface target_from_name(const std::string& name) {
    if (name == "plane") return TargetSurface::plane();
    if (name.rfind("H0_", 0) == 0) return TargetSurface::chain(std::stol(name.substr(3)), name);
    if (name == "loch-ness") return TargetSurface::chain(std::nullopt, name);
    if (name == "cylinder") return TargetSurface::from_tree(ColoredTree::line(6, 0), name);
    if (name == "jacobs-ladder") return TargetSurface::from_tree(ColoredTree::line(6, 1), name);
    if (name == "cantor-tree") return TargetSurface::from_tree(ColoredTree::full_binary(4, 0), name);
    throw std::invalid_argument("unknown target: " + name +
                                " (use plane, H0_<k>, loch-ness, cylinder, jacobs-ladder, cantor-tree)");
}

}  // namespace

PYBIND11_MODULE(pyfolia, m) {
    m.doc() = "circle-dynamics toolkit for realizing noncompact surfaces as foliation leaves";

    py::class_<MoebiusMap>(m, "Moebius")
        .def(py::init([](const std::string& literal) { return MoebiusMap::parse(literal); }),
             py::arg("matrix"), "Parse a matrix literal [[a,b],[c,d]] with rational entries.")
        .def_static("identity", &MoebiusMap::identity)
        .def_static("translation",
                    [](const std::string& t) { return MoebiusMap::translation(parse_rational(t)); })
        .def("__call__",
             [](const MoebiusMap& self, const std::string& point) {
                 return self(parse_point(point)).str();
             })
        .def("inverse", &MoebiusMap::inverse)
        .def("__mul__", [](const MoebiusMap& a, const MoebiusMap& b) { return compose(a, b); })
        .def("__eq__", [](const MoebiusMap& a, const MoebiusMap& b) { return a == b; })
        .def("__str__", &MoebiusMap::str)
        .def("__repr__", &MoebiusMap::str_fractional);

    m.def("commutator", &commutator, "m1^-1 m2^-1 m1 m2");
    m.def("classify", &classify_dict, "Classification tag, order and exact fixed points.");
    m.def(
        "rotation_number",
        [](const MoebiusMap& map, int bound) -> py::object {
            const auto rot = rotation_number(map, bound);
            if (!rot) return py::none();
            return py::str(rot->get_str());
        },
        py::arg("map"), py::arg("bound") = 64);
    m.def(
        "translation_number",
        [](const std::vector<MoebiusMap>& word, const MoebiusMap& deck, int iterations) {
            return translation_number(word, deck, iterations);
        },
        py::arg("word"), py::arg("deck"), py::arg("iterations") = 1000,
        "Birkhoff deck-unit displacement of the composed word on the line.");

    m.def(
        "reduce",
        [](const std::string& ell_shift, const std::string& point) {
            const ParabolicAnchor anchor(MoebiusMap::translation(parse_rational(ell_shift)));
            const auto red = reduce(anchor, parse_point(point));
            return py::make_tuple(red.k.get_str(), red.xbar.str());
        },
        py::arg("ell_shift"), py::arg("point"),
        "Reduced coordinate (k, xbar) with ell^k(x) = xbar in [0, ell(0)).");

    m.def(
        "surface_invariants",
        [](const std::string& target, int depth) {
            return target_from_name(target).predicted_invariants(depth).str();
        },
        py::arg("target"), py::arg("depth") = 6);
    m.def(
        "homeomorphic",
        [](const std::string& a, const std::string& b, int depth) {
            return std::string(verdict_name(homeomorphic(target_from_name(a).predicted_invariants(depth),
                                                         target_from_name(b).predicted_invariants(depth))));
        },
        py::arg("a"), py::arg("b"), py::arg("depth") = 6);

    m.def(
        "realize",
        [](const std::string& target, int window, int depth, int radius, int length,
           const std::string& backend, unsigned seed) {
            const auto pair = make_handle_pair();
            const RealizationPlan plan =
                compile_plan(*pair, target_from_name(target), window, depth);
            GluedAction action = assemble_action(*pair, plan, parse_backend(backend), seed);
            return report_dict(reconstruct_with_perturbation(action, plan, radius, length, 3));
        },
        py::arg("target"), py::arg("window") = 16, py::arg("depth") = 6, py::arg("radius") = 5,
        py::arg("length") = 4, py::arg("backend") = "pl", py::arg("seed") = 2024,
        "Compile, glue and reconstruct one target over the genus-2 block pair.");

    m.def(
        "euler_numbers",
        [](int iterations) {
            const auto pair = make_handle_pair();
            const EulerReport rep = euler_numbers(*pair, iterations);
            py::dict out;
            out["chi_right"] = rep.chi_right.get_str();
            out["chi_left"] = rep.chi_left.get_str();
            out["total_abs"] = rep.total_abs.get_str();
            out["side_right"] = rep.side_right;
            out["side_left"] = rep.side_left;
            return out;
        },
        py::arg("iterations") = 2000);
}
