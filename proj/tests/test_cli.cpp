#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using std::filesystem::path;

namespace {

struct TempDir {
    path dir;
    explicit TempDir(const std::string& tag) {
        dir = std::filesystem::temp_directory_path() /
              ("gaitprint_cli_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(GAITPRINT_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("synth -> detect -> features -> evaluate -> report completes") {
    TempDir tmp("pipeline");
    const path corpus = tmp.dir / "corpus";
    CHECK(run("synth --output " + corpus.string() +
              " --seed 11 --subjects 4 --durations 8,10,8") == 0);
    CHECK(std::filesystem::exists(corpus / "subject_001" / "session_1" / "task_1.csv"));
    CHECK(std::filesystem::exists(corpus / "effective_config.json"));

    const path det = tmp.dir / "det";
    CHECK(run("detect --input " + corpus.string() + " --output " + det.string()) == 0);
    CHECK(std::filesystem::exists(det / "complexes.jsonl"));
    CHECK(std::filesystem::exists(det / "diagnostics.json"));

    const path feat = tmp.dir / "feat";
    CHECK(run("features --input " + corpus.string() + " --output " + feat.string()) == 0);
    const std::string features_csv = slurp(feat / "features.csv");
    CHECK(features_csv.rfind("subject,session,task,axis,p_amp", 0) == 0);
    CHECK(std::filesystem::exists(feat / "histograms.csv"));

    const path feat_subj = tmp.dir / "feat_subj";
    CHECK(run("features --input " + corpus.string() + " --output " + feat_subj.string() +
              " --per-subject") == 0);
    CHECK(slurp(feat_subj / "histograms.csv")
              .rfind("subject,axis,feature,bin_lo,bin_hi,count", 0) == 0);

    const path eval = tmp.dir / "eval";
    CHECK(run("evaluate --input " + corpus.string() + " --output " + eval.string() +
              " --seed 5 --svm-epochs 40") == 0);
    CHECK(std::filesystem::exists(eval / "eval_table.csv"));
    CHECK(std::filesystem::exists(eval / "eval_table.json"));
    CHECK(std::filesystem::exists(eval / "pair_detail.csv"));

    const path rep = tmp.dir / "rep";
    CHECK(run("report --input " + eval.string() + " --output " + rep.string()) == 0);
    const std::string report = slurp(rep / "report.txt");
    CHECK(report.find("Directional checks") != std::string::npos);
}

TEST_CASE("evaluate fails cleanly with fewer than two subjects") {
    TempDir tmp("onesubject");
    const path corpus = tmp.dir / "corpus";
    REQUIRE(run("synth --output " + corpus.string() +
                " --seed 3 --subjects 2 --durations 6,6,6") == 0);
    std::filesystem::remove_all(corpus / "subject_002");
    const path eval = tmp.dir / "eval";
    CHECK(run("evaluate --input " + corpus.string() + " --output " + eval.string() +
              " --seed 5") != 0);
}

TEST_CASE("identical seeds produce byte-identical evaluation outputs") {
    TempDir tmp("determinism");
    const path corpus = tmp.dir / "corpus";
    REQUIRE(run("synth --output " + corpus.string() +
                " --seed 21 --subjects 3 --durations 8,8,8") == 0);
    const path eval_a = tmp.dir / "eval_a";
    const path eval_b = tmp.dir / "eval_b";
    const std::string common = "evaluate --input " + corpus.string() +
                               " --seed 99 --svm-epochs 30 --output ";
    REQUIRE(run(common + eval_a.string()) == 0);
    REQUIRE(run(common + eval_b.string()) == 0);
    CHECK(slurp(eval_a / "eval_table.csv") == slurp(eval_b / "eval_table.csv"));
    CHECK(slurp(eval_a / "pair_detail.csv") == slurp(eval_b / "pair_detail.csv"));
    CHECK(slurp(eval_a / "eval_table.json") == slurp(eval_b / "eval_table.json"));
}

TEST_CASE("synth honors config files with flag precedence") {
    TempDir tmp("config");
    const path cfg_path = tmp.dir / "cfg.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"subjects": 3, "durations": "6,6,6", "noise": 0.01})";
    }
    const path corpus = tmp.dir / "corpus";
    CHECK(run("synth --output " + corpus.string() + " --seed 1 --config " + cfg_path.string() +
              " --subjects 2") == 0);
    // flag wins over config: 2 subjects, durations from config
    CHECK(std::filesystem::exists(corpus / "subject_002"));
    CHECK_FALSE(std::filesystem::exists(corpus / "subject_003"));
    const std::string echoed = slurp(corpus / "effective_config.json");
    CHECK(echoed.find("\"subjects\": 2") != std::string::npos);
}

TEST_CASE("unknown flags and missing subcommands fail fast") {
    CHECK(run("detect --no-such-flag") != 0);
    CHECK(run("") != 0);
    CHECK(run("--help") == 0);
    CHECK(run("synth --help") == 0);
}

TEST_CASE("missing seed on seed-mandatory commands is an error") {
    TempDir tmp("noseed");
    CHECK(run("synth --output " + (tmp.dir / "x").string() + " --subjects 2") != 0);
    CHECK(run("evaluate --input " + tmp.dir.string() + " --output " +
              (tmp.dir / "y").string()) != 0);
}

TEST_CASE("GAITPRINT_DATA provides the default input root") {
    TempDir tmp("envroot");
    const path corpus = tmp.dir / "corpus";
    REQUIRE(run("synth --output " + corpus.string() +
                " --seed 8 --subjects 2 --durations 6,6,6") == 0);
    const path det = tmp.dir / "det";
    const std::string cmd = "GAITPRINT_DATA=" + corpus.string() + " " + GAITPRINT_BIN +
                            " detect --output " + det.string() + " >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(std::filesystem::exists(det / "complexes.jsonl"));
}
