#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = CELLFOREST_CLI_PATH;
const std::string kDataDir = CELLFOREST_DATA_DIR;

int run(const std::string& args) {
    std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("verify suites exit zero on success") {
    CHECK(run("verify kalai --n 5 --k 2") == 0);
    CHECK(run("verify duality --n 2") == 0);
    CHECK(run("verify key --complex " + kDataDir + "/rp2.complex") == 0);
    CHECK(run("verify oracle --complex " + kDataDir + "/k4.complex --k 1 --side lower") == 0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("kernel --k 1") == 2);       // no complex source
    CHECK(run("no-such-command") == 2);    // unknown subcommand
    CHECK(run("verify key --complex /nonexistent.complex") == 2);
    CHECK(run("verify key --complex " + kDataDir + "/k4.complex") == 2);  // d = 1 rejected
}

TEST_CASE("budget overruns exit with code 3") {
    CHECK(run("verify kalai --n 6 --k 2 --budget 10") == 3);
    CHECK(run("enumerate --simplex 6 2 --k 2 --side base --budget 100") == 3);
}

TEST_CASE("kernel report files carry exact rationals") {
    std::string out = "/tmp/cellforest_kernel_test.json";
    CHECK(run("kernel --complex " + kDataDir + "/k4.complex --k 1 --side lower --out " + out) == 0);
    std::string json = slurp(out);
    CHECK(json.find("\"rank\": 3") != std::string::npos);
    CHECK(json.find("1/2") != std::string::npos);
    std::remove(out.c_str());
}

TEST_CASE("sampling through the CLI is deterministic") {
    std::string out1 = "/tmp/cellforest_sample_1.json";
    std::string out2 = "/tmp/cellforest_sample_2.json";
    std::string base = "sample --complex " + kDataDir + "/k4.complex --k 1 --side lower --seed 3";
    CHECK(run(base + " --out " + out1) == 0);
    CHECK(run(base + " --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(!slurp(out1).empty());
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("figure output is byte-identical across runs") {
    std::string f1 = "/tmp/cellforest_fig_1.svg";
    std::string f2 = "/tmp/cellforest_fig_2.svg";
    CHECK(run("experiment torus-duality --n 8 --seed 7 --out " + f1) == 0);
    CHECK(run("experiment torus-duality --n 8 --seed 7 --out " + f2) == 0);
    std::string svg = slurp(f1);
    CHECK(svg == slurp(f2));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("#b3b3b3") != std::string::npos);  // gray tree edges
    CHECK(svg.find("#000000") != std::string::npos);  // black dual cycle edges
    std::remove(f1.c_str());
    std::remove(f2.c_str());
}

TEST_CASE("cellprob experiment emits the exact closed-form values") {
    std::string csv = "/tmp/cellforest_cellprob.csv";
    CHECK(run("experiment cellprob --d 2 --k 1 --n 4,8 --csv " + csv) == 0);
    std::string data = slurp(csv);
    CHECK(data.find("4,15/32,1/2,1/32") != std::string::npos);
    CHECK(data.find("8,63/128,1/2,1/128") != std::string::npos);
    std::remove(csv.c_str());
}

TEST_CASE("interior-region kernels through the CLI") {
    std::string out = "/tmp/cellforest_box.json";
    CHECK(run("kernel --torus 2 6 --k 1 --side lower --box 0 0 5 5 --out " + out) == 0);
    std::string json = slurp(out);
    CHECK(json.find("\"rank\": 9") != std::string::npos);  // interior vertices of a 5x5 box
    CHECK(json.find("interior") != std::string::npos);
    std::remove(out.c_str());
}

TEST_CASE("budget environment variable is honored") {
    std::string cmd = "CELLFOREST_BUDGET=10 " + kCli +
                      " verify kalai --n 6 --k 2 > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 3);
}

TEST_CASE("enumerate CLI reports the torsion histogram") {
    std::string out = "/tmp/cellforest_enum.json";
    CHECK(run("enumerate --complex " + kDataDir + "/rp2.complex --k 2 --side base --out " + out) ==
          0);
    std::string json = slurp(out);
    CHECK(json.find("\"count\": 1") != std::string::npos);
    CHECK(json.find("\"torsion\": \"2\"") != std::string::npos);
    std::remove(out.c_str());
}
