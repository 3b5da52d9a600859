// End-to-end exercise of the command-line front door: validate and realize a
// small run, check artifacts and determinism, then audit it.
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_binary;
std::string g_configs;

int run(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("validate, realize, audit, report round trip") {
    namespace fs = std::filesystem;
    const fs::path work = fs::temp_directory_path() / "folia_cli_test";
    fs::remove_all(work);
    const std::string config = g_configs + "/realize_single.json";

    CHECK(run("--config " + config + " --out " + (work / "run1").string() + " validate") == 0);
    CHECK(fs::exists(work / "run1" / "blocks.csv"));

    CHECK(run("--config " + config + " --out " + (work / "run1").string() +
              " --radius 5 --length 4 realize") == 0);
    for (const char* name : {"plan.txt", "bisequences.csv", "leaf_report_0.txt", "orbit_0.csv",
                             "leaf_0.svg", "summary.txt"})
        CHECK(fs::exists(work / "run1" / name));
    const std::string summary = slurp(work / "run1" / "summary.txt");
    CHECK(summary.find("Equal-at-depth") != std::string::npos);
    CHECK(summary.find("seed 2024") != std::string::npos);

    // Byte-identical rerun with the same config and seed.
    CHECK(run("--config " + config + " --out " + (work / "run2").string() +
              " --radius 5 --length 4 realize") == 0);
    CHECK(slurp(work / "run1" / "bisequences.csv") == slurp(work / "run2" / "bisequences.csv"));
    CHECK(slurp(work / "run1" / "plan.txt") == slurp(work / "run2" / "plan.txt"));
    CHECK(slurp(work / "run1" / "orbit_0.csv") == slurp(work / "run2" / "orbit_0.csv"));
    CHECK(slurp(work / "run1" / "leaf_0.svg") == slurp(work / "run2" / "leaf_0.svg"));

    CHECK(run("--config " + config + " --out " + (work / "run1").string() +
              " --radius 5 --length 4 audit") == 0);
    CHECK(fs::exists(work / "run1" / "stabilizer_0.csv"));
    CHECK(fs::exists(work / "run1" / "special_points.csv"));
    const std::string special = slurp(work / "run1" / "special_points.csv");
    CHECK(special.find("b_index,image,word") != std::string::npos);
    CHECK(special.rfind('\n') == special.size() - 1);

    CHECK(run("--config " + config + " --out " + (work / "run1").string() + " report") == 0);

    // Audit without a realized directory fails.
    CHECK(run("--config " + config + " --out " + (work / "fresh").string() + " audit") != 0);

    // Corrupted matrix entry surfaces as a parse error.
    const fs::path bad_dir = work / "bad";
    fs::create_directories(bad_dir);
    std::ofstream bad_block(bad_dir / "bad_block.json");
    bad_block << "{\"side\":\"right\",\"genus\":1,\"generators\":{\"p\":\"[[1,2],[3]]\"},"
              << "\"boundary_word\":\"p\"}";
    bad_block.close();
    std::ofstream bad_cfg(bad_dir / "bad.json");
    bad_cfg << "{\"blocks\":{\"right\":\"bad_block.json\",\"left\":\"bad_block.json\"},"
            << "\"targets\":[{\"kind\":\"plane\"}]}";
    bad_cfg.close();
    CHECK(run("--config " + (bad_dir / "bad.json").string() + " validate") != 0);

    fs::remove_all(work);
}

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: test_cli <folia-binary> <configs-dir>\n");
        return 2;
    }
    g_binary = argv[1];
    g_configs = argv[2];
    doctest::Context context;
    return context.run();
}
