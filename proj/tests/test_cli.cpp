#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    json j() const { return json::parse(out); }
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" UALG_CLI "\" " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) {
        r.out.append(buf.data(), n);
    }
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fx(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("ualg_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST(Cli, Usage) {
    EXPECT_EQ(run("").code, 64);
    EXPECT_EQ(run("frobnicate").code, 64);
    EXPECT_EQ(run("con").code, 64);
    EXPECT_EQ(run("con " + fx("nope.alg.json")).code, 64);
    EXPECT_EQ(run("con " + fx("klein4.alg.json") + " --format xml").code, 64);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, Con) {
    auto k = run("con " + fx("klein4.alg.json") + " --properties");
    ASSERT_EQ(k.code, 0);
    EXPECT_EQ(k.j()["size"], 5);
    EXPECT_FALSE(k.j()["m3"].is_null());
    EXPECT_EQ(k.j()["m3"]["atoms"].size(), 3u);
    auto t = run("con " + fx("trivial.alg.json"));
    EXPECT_EQ(t.j()["size"], 1);
    auto c = run("con " + fx("chain3.alg.json") + " --properties");
    EXPECT_EQ(c.j()["size"], 4);
    EXPECT_EQ(c.j()["properties"]["distributive"], true);
    EXPECT_TRUE(c.j()["m3"].is_null());
    auto dot = run("con " + fx("m3.alg.json") + " --format dot");
    EXPECT_EQ(dot.code, 0);
    EXPECT_EQ(dot.out.rfind("digraph con {", 0), 0u);
    EXPECT_EQ(run("con " + fx("m3.alg.json") + " --format dot").out, dot.out);
}

TEST(Cli, ConCap) {
    EXPECT_EQ(run("con " + fx("klein4.alg.json") + " --cap 3").code, 3);
    EXPECT_EQ(run("con " + fx("klein4.alg.json"), "UALG_CON_CAP=4").code, 3);
    EXPECT_EQ(run("con " + fx("klein4.alg.json"), "UALG_CON_CAP=5").code, 0);
    EXPECT_EQ(run("con " + fx("klein4.alg.json"), "UALG_CON_CAP=many").code, 64);
    EXPECT_EQ(run("--jobs 4 con " + fx("d4.alg.json")).out, run("con " + fx("d4.alg.json")).out);
}

TEST(Cli, Commutator) {
    auto s3 = run("commutator " + fx("s3.alg.json") + " --abelian");
    ASSERT_EQ(s3.code, 0);
    EXPECT_EQ(s3.j()["commutator"], json::parse("[[0,3,4],[1,2,5]]"));
    EXPECT_EQ(s3.j()["abelian"], false);
    auto z4 = run("commutator " + fx("z4.alg.json") + " --alpha 1 --beta 1");
    EXPECT_EQ(z4.j()["commutator"], json::parse("[[0],[1],[2],[3]]"));
    auto cen = run("commutator " + fx("s3.alg.json") + " --beta 0 --centralizer");
    EXPECT_EQ(cen.j()["centralizer"], json::parse("[[0,1,2,3,4,5]]"));
    auto blocks = run("commutator " + fx("z4.alg.json") + " --alpha \"0 2|1 3\" --beta \"0,2|1,3\"");
    EXPECT_EQ(blocks.code, 0);
    EXPECT_EQ(blocks.j()["alpha"], json::parse("[[0,2],[1,3]]"));
    auto bad = run("commutator " + fx("z4.alg.json") + " --alpha \"0 1|2 3\"");
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(bad.j()["error"], "not a congruence");
    EXPECT_EQ(run("commutator " + fx("z4.alg.json") + " --alpha \"0 1|x\"").code, 64);
    EXPECT_EQ(run("commutator " + fx("z4.alg.json") + " --alpha \"0 1|1 2 3\"").code, 64);
}

TEST(Cli, Bowtie) {
    auto v = run("bowtie --verify");
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.j()["ok"], true);
    auto j = run("bowtie --emit json");
    EXPECT_EQ(j.j()["vertices"].size(), 8u);
    EXPECT_EQ(j.j()["arrows"].size(), 15u);
    EXPECT_EQ(j.j(), json::parse(slurp(fx("diagrams/bowtie.json"))));
    EXPECT_EQ(run("bowtie --emit dot").out, slurp(fx("diagrams/bowtie.dot")));
    EXPECT_EQ(run("bowtie --emit svg").code, 64);
    EXPECT_EQ(run("bowtie --emit json --verify").code, 64);
}

TEST(Cli, CatalogAndLift) {
    TempDir t("lift");
    const auto lat4 = (t.path / "lat4").string();
    auto g = run("catalog gen --kind lattice --max-size 4 --out " + lat4);
    ASSERT_EQ(g.code, 0);
    EXPECT_EQ(g.j()["counts"], json::parse("[1,1,1,2]"));
    EXPECT_EQ(run("catalog gen --kind lattice --max-size 4 --out " + lat4).code, 64);

    auto e = run("lift " + fx("diagrams/e_arrow.json") + " --catalog " + lat4);
    ASSERT_EQ(e.code, 0);
    EXPECT_GE(e.j()["liftings"].get<int>(), 1);
    EXPECT_EQ(e.j()["exhaustive"], true);
    EXPECT_EQ(e.j()["results"][0]["candidate"]["vertices"][0]["ref"].get<std::string>().size(), 13u);

    const auto lat6 = (t.path / "lat6").string();
    auto g6 = run("catalog gen --kind lattice --max-size 6 --out " + lat6);
    EXPECT_EQ(g6.j()["counts"], json::parse("[1,1,1,2,5,15]"));
    EXPECT_EQ(g6.j()["total"], 25);
    auto b = run("--jobs 2 lift " + fx("diagrams/bowtie.json") + " --catalog " + lat6);
    EXPECT_EQ(b.code, 0);
    EXPECT_EQ(b.j()["liftings"], 0);
    EXPECT_EQ(b.j()["exhaustive"], true);

    auto trunc = run("lift " + fx("diagrams/e_arrow.json") + " --catalog " + lat4 + " --budget 1");
    EXPECT_EQ(trunc.code, 2);
    EXPECT_EQ(trunc.j()["exhaustive"], false);

    EXPECT_EQ(run("lift " + fx("diagrams/e_arrow.json") + " --catalog " + (t.path / "missing").string()).code, 64);
    EXPECT_EQ(run("lift " + fx("diagrams/e_arrow.json")).code, 64);
}

TEST(Cli, CatalogSizes) {
    TempDir t("gen");
    auto one = run("catalog gen --kind lattice --max-size 1 --out " + (t.path / "one").string());
    EXPECT_EQ(one.j()["counts"], json::parse("[1]"));
    auto g = run("catalog gen --kind algebra --ops f/2 --max-size 2 --out " + (t.path / "binars").string());
    EXPECT_EQ(g.j()["counts"], json::parse("[1,10]"));
    auto s = run("catalog gen --kind algebra --ops f/2 --filter semilattice --max-size 3 --out " +
                 (t.path / "sl").string());
    EXPECT_EQ(s.j()["counts"], json::parse("[1,1,2]"));
    EXPECT_EQ(run("catalog gen --kind algebra --ops f/2 --max-size 5 --out " + (t.path / "big").string()).code, 3);
    EXPECT_EQ(run("catalog gen --kind algebra --ops f --max-size 2 --out " + (t.path / "x").string()).code, 64);
}

TEST(Cli, Random) {
    auto a = run("random --seed 7 --size 3 --ops f/2,g/1");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, run("random --seed 7 --size 3 --ops f/2,g/1").out);
    EXPECT_NE(a.out, run("random --seed 8 --size 3 --ops f/2,g/1").out);
    EXPECT_EQ(a.j()["size"], 3);
    EXPECT_EQ(a.j()["ops"].size(), 2u);
}
