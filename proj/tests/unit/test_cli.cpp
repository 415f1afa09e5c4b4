#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("ammknn_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    int run(const std::string& args) const {
        const std::string cmd = "cd '" + dir.string() + "' && '" AMMKNN_CLI_PATH "' " + args + " >out.txt 2>err.txt";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    void write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name, std::ios::binary) << text;
    }
    std::string read(const std::string& name) const {
        std::ifstream in(dir / name, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
};

const char* kSpec = R"({"seed": 7, "n_rows": 224, "cohort_sizes": [40, 49, 48, 44, 43]})";

} // namespace

TEST_CASE("cli full workflow succeeds and is deterministic") {
    Sandbox s;
    s.write("spec.json", kSpec);
    REQUIRE(s.run("synth --spec spec.json --out .") == 0);
    const auto csv = s.read("synthetic.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 225);
    REQUIRE(s.run("prepare --input synthetic.csv --out prep") == 0);
    const auto printed = s.read("out.txt");
    CHECK(printed.find("dropped") != std::string::npos);
    REQUIRE(s.run("loocv --input prep/alumni.csv --out rep --format json") == 0);
    const auto first = s.read("rep/loocv_report.json");
    CHECK(s.read("out.txt") == first);
    REQUIRE(s.run("loocv --input prep/alumni.csv --out rep --threads 3") == 0);
    CHECK(s.read("rep/loocv_report.json") == first);
    REQUIRE(s.run("validate --train prep/train.csv --cohort prep/cohort.csv --out rep") == 0);
    REQUIRE(s.run("plot --report rep/validate_report.json --out rep") == 0);
    CHECK(fs::exists(s.dir / "rep/ammknn_scatter.svg"));
    REQUIRE(s.run("predict --train prep/train.csv --cohort prep/cohort.csv --out rep --format json") == 0);
    const auto lines = s.read("rep/predictions.jsonl");
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 43);
}

TEST_CASE("cli exit codes") {
    Sandbox s;
    s.write("spec.json", kSpec);
    REQUIRE(s.run("synth --spec spec.json --out .") == 0);

    SUBCASE("missing target column is a config error") {
        s.write("cfg.json", R"({"target_name": "pance"})");
        CHECK(s.run("prepare --config cfg.json --input synthetic.csv --out prep") == 2);
    }
    SUBCASE("unknown config key is a config error") {
        s.write("cfg.json", R"({"threshold": 0.1})");
        CHECK(s.run("prepare --config cfg.json --input synthetic.csv --out prep") == 2);
    }
    SUBCASE("invalid synth spec is a config error") {
        s.write("bad.json", R"({"n_rows": 0})");
        CHECK(s.run("synth --spec bad.json --out .") == 2);
        s.write("bad.json", R"({"rows": 10})");
        CHECK(s.run("synth --spec bad.json --out .") == 2);
    }
    SUBCASE("bad flags are a config error") {
        CHECK(s.run("loocv --input x.csv --format xml") == 2);
        CHECK(s.run("nonsense") == 2);
    }
    SUBCASE("non-numeric cell is a data error") {
        s.write("bad.csv", "id,cohort,f01,score\nS1,2015,abc,400\n");
        CHECK(s.run("prepare --input bad.csv --out prep") == 3);
        CHECK(s.read("err.txt").find("bad.csv") != std::string::npos);
    }
    SUBCASE("missing input file is a data error") {
        CHECK(s.run("loocv --input nowhere.csv --out rep") == 3);
    }
    SUBCASE("malformed report is a data error") {
        s.write("r.json", "{\"models\": {}}");
        CHECK(s.run("plot --report r.json --out .") == 3);
    }
    SUBCASE("cohort lacking a training column is a data error") {
        REQUIRE(s.run("prepare --input synthetic.csv --out prep") == 0);
        s.write("c.csv", "id,score\nS9,400\n");
        CHECK(s.run("validate --train prep/train.csv --cohort c.csv --out rep") == 3);
    }
    SUBCASE("help succeeds") {
        CHECK(s.run("--help") == 0);
    }
}
