#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ganbench/png_io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCli = GANBENCH_CLI_PATH;
const fs::path kGoldenDir = GANBENCH_GOLDEN_DIR;

struct RunResult {
    int code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    const fs::path out_file = fs::temp_directory_path() / "ganbench_cli_out.txt";
    const std::string cmd =
        env + (env.empty() ? "" : " ") + kCli.string() + " " + args + " > " + out_file.string() +
        " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("ganbench_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Small fixture benchmark: fixed seeds, tiny nets, a few epochs.
std::string fixture_config(const fs::path& out_dir) {
    std::ostringstream os;
    os << "[dataset]\n"
          "source = \"synthetic\"\n"
          "synthetic_n = 16\n"
          "resolution = 16\n"
          "split_ratio = 0.7\n"
          "split_seed = 42\n"
          "\n[output]\n"
          "dir = \""
       << out_dir.generic_string()
       << "\"\n"
          "\n[metrics]\n"
          "eval_every = 2\n"
          "n_splits = 2\n"
          "classifier_k = 4\n"
          "\n[training.vanilla]\n"
          "epochs = 4\nbatch_size = 4\ngen_base_filters = 16\ndisc_base_filters = 8\n"
          "\n[training.dcgan]\n"
          "epochs = 4\nbatch_size = 4\ngen_base_filters = 16\ndisc_base_filters = 8\n"
          "\n[training.wgan]\n"
          "epochs = 4\nbatch_size = 4\ngen_base_filters = 16\ndisc_base_filters = 8\n";
    return os.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "bench.toml";
    std::ofstream out(p);
    out << text;
    return p;
}

nlohmann::json strip_wall_time(const fs::path& run_json) {
    auto j = nlohmann::json::parse(read_file(run_json));
    j.erase("wall_time");
    return j;
}

void check_golden(const std::string& name, const std::string& actual) {
    const fs::path golden = kGoldenDir / name;
    if (std::getenv("GANBENCH_UPDATE_GOLDEN") != nullptr) {
        fs::create_directories(kGoldenDir);
        std::ofstream out(golden, std::ios::binary);
        out << actual;
        return;
    }
    REQUIRE_MESSAGE(fs::exists(golden), "missing golden file ", golden.string(),
                    " (set GANBENCH_UPDATE_GOLDEN=1 to create)");
    CHECK_MESSAGE(actual == read_file(golden), "output differs from ", golden.string());
}

}  // namespace

TEST_CASE("cli end to end: prepare, train all, report") {
    const fs::path dir = fresh_dir("e2e");
    const fs::path cfg = write_config(dir, fixture_config(dir / "out"));

    auto prep = run_cli("prepare-data --config " + cfg.string());
    CHECK(prep.code == 0);
    CHECK(prep.output.find("11 train / 5 test") != std::string::npos);

    // idempotent re-run: same hash, nothing rewritten
    const auto mtime_before = fs::last_write_time(dir / "out/dataset/manifest.json");
    auto prep2 = run_cli("prepare-data --config " + cfg.string());
    CHECK(prep2.code == 0);
    CHECK(prep2.output.find("up to date") != std::string::npos);
    CHECK(fs::last_write_time(dir / "out/dataset/manifest.json") == mtime_before);

    auto train = run_cli("train --config " + cfg.string() + " --family all");
    CHECK(train.code == 0);

    // master seed 7 -> seeds 7, 8, 9 by family index
    for (const auto& [run_id, seed] :
         {std::pair<std::string, int>{"vanilla-seed7", 7}, {"dcgan-seed8", 8}, {"wgan-seed9", 9}}) {
        const fs::path run_dir = dir / "out/runs" / run_id;
        REQUIRE(fs::exists(run_dir / "run.json"));
        const auto j = nlohmann::json::parse(read_file(run_dir / "run.json"));
        CHECK(j.at("seed").get<int>() == seed);
        CHECK(j.at("epoch_count").get<int>() == 4);
        // 4 epochs -> header + 4 rows
        std::istringstream log(read_file(run_dir / "training_log.csv"));
        int lines = 0;
        for (std::string line; std::getline(log, line);) ++lines;
        CHECK(lines == 5);
    }

    auto report = run_cli("report --config " + cfg.string());
    CHECK(report.code == 0);
    for (const char* name : {"curves_ssim.png", "curves_psnr.png", "curves_is.png",
                             "comparison.md", "stats_report.json", "stats_report.md",
                             "report.json"})
        CHECK(fs::exists(dir / "out/report" / name));

    // curve files carry the PNG signature
    const std::string png_bytes = read_file(dir / "out/report/curves_ssim.png");
    REQUIRE(png_bytes.size() > 8);
    CHECK(png_bytes.compare(0, 8, "\x89PNG\r\n\x1a\n", 8) == 0);

    // comparison.md values trace back to the final metrics in run.json
    const auto report_json = nlohmann::json::parse(read_file(dir / "out/report/report.json"));
    const std::string comparison = read_file(dir / "out/report/comparison.md");
    for (const auto& run : report_json.at("runs")) {
        const auto& fm = run.at("final_metrics");
        REQUIRE_FALSE(fm.is_null());
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%.2f&plusmn;%.3f", fm.at("ssim_mean").get<double>(),
                      fm.at("ssim_std").get<double>());
        CHECK(comparison.find(cell) != std::string::npos);
        // and the run.json on disk agrees with the report provenance
        const auto disk = nlohmann::json::parse(read_file(run.at("source").get<std::string>()));
        CHECK(disk.at("final_metrics") == fm);
    }
}

TEST_CASE("cli determinism: rerun of the same config produces identical artifacts") {
    const fs::path dir = fresh_dir("det");
    const fs::path cfg = write_config(dir, fixture_config(dir / "out"));
    auto run_all = [&] {
        REQUIRE(run_cli("prepare-data --config " + cfg.string()).code == 0);
        REQUIRE(run_cli("train --config " + cfg.string() + " --family all").code == 0);
        REQUIRE(run_cli("report --config " + cfg.string()).code == 0);
    };
    run_all();
    const fs::path first = dir / "first";
    fs::rename(dir / "out", first);
    run_all();
    const fs::path second = dir / "out";

    for (const char* run_id : {"vanilla-seed7", "dcgan-seed8", "wgan-seed9"}) {
        CHECK(read_file(first / "runs" / run_id / "training_log.csv") ==
              read_file(second / "runs" / run_id / "training_log.csv"));
        CHECK(read_file(first / "runs" / run_id / "observations.json") ==
              read_file(second / "runs" / run_id / "observations.json"));
        CHECK(strip_wall_time(first / "runs" / run_id / "run.json") ==
              strip_wall_time(second / "runs" / run_id / "run.json"));
    }
    CHECK(read_file(first / "report/stats_report.json") ==
          read_file(second / "report/stats_report.json"));
    CHECK(read_file(first / "report/comparison.md") == read_file(second / "report/comparison.md"));
    CHECK(read_file(first / "report/curves_ssim.png") ==
          read_file(second / "report/curves_ssim.png"));
}

TEST_CASE("cli golden report fixtures") {
    const fs::path dir = fresh_dir("golden");
    const fs::path cfg = write_config(dir, fixture_config(dir / "out"));
    REQUIRE(run_cli("prepare-data --config " + cfg.string()).code == 0);
    REQUIRE(run_cli("train --config " + cfg.string() + " --family all").code == 0);
    REQUIRE(run_cli("report --config " + cfg.string()).code == 0);
    check_golden("comparison.md", read_file(dir / "out/report/comparison.md"));
    check_golden("stats_report.md", read_file(dir / "out/report/stats_report.md"));
}

TEST_CASE("cli single-family train with overrides and evaluate") {
    const fs::path dir = fresh_dir("single");
    const fs::path cfg = write_config(dir, fixture_config(dir / "out"));
    REQUIRE(run_cli("prepare-data --config " + cfg.string()).code == 0);
    auto train = run_cli("train --config " + cfg.string() +
                         " --family vanilla --seed 33 --epochs 2");
    CHECK(train.code == 0);
    const fs::path run_dir = dir / "out/runs/vanilla-seed33";
    REQUIRE(fs::exists(run_dir / "run.json"));
    const auto j = nlohmann::json::parse(read_file(run_dir / "run.json"));
    CHECK(j.at("epoch_count").get<int>() == 2);
    CHECK(j.at("seed").get<int>() == 33);

    auto eval = run_cli("evaluate --run " + run_dir.string());
    CHECK(eval.code == 0);
    CHECK(eval.output.find("ssim=") != std::string::npos);
}

TEST_CASE("cli stats subcommand over run directories") {
    const fs::path dir = fresh_dir("stats");
    const fs::path cfg = write_config(dir, fixture_config(dir / "out"));
    REQUIRE(run_cli("prepare-data --config " + cfg.string()).code == 0);
    REQUIRE(run_cli("train --config " + cfg.string() + " --family all").code == 0);
    const std::string runs = (dir / "out/runs/vanilla-seed7").string() + " " +
                             (dir / "out/runs/dcgan-seed8").string() + " " +
                             (dir / "out/runs/wgan-seed9").string();
    auto stats = run_cli("stats --runs " + runs + " --out " + (dir / "statsout").string());
    CHECK(stats.code == 0);
    REQUIRE(fs::exists(dir / "statsout/stats_report.json"));
    const auto j = nlohmann::json::parse(read_file(dir / "statsout/stats_report.json"));
    REQUIRE(j.size() == 3);  // ssim, psnr, is
    for (const auto& metric : j) CHECK(metric.at("pairs").size() == 3);
}

TEST_CASE("cli exit codes") {
    const fs::path dir = fresh_dir("codes");
    // malformed config -> 2
    const fs::path bad = write_config(dir, "[dataset]\nbogus = 1\n");
    CHECK(run_cli("prepare-data --config " + bad.string()).code == 2);
    // train without a prepared dataset -> 2 (validation against the manifest)
    const fs::path cfg = write_config(dir, fixture_config(dir / "out"));
    CHECK(run_cli("train --config " + cfg.string()).code == 2);
    // report with no runs -> 5
    REQUIRE(run_cli("prepare-data --config " + cfg.string()).code == 0);
    CHECK(run_cli("report --config " + cfg.string()).code == 5);
    // missing subcommand -> CLI parse failure (nonzero, not one of ours)
    CHECK(run_cli("").code != 0);
}

TEST_CASE("GANBENCH_OUTPUT overrides the output dir") {
    const fs::path dir = fresh_dir("envout");
    const fs::path cfg = write_config(dir, fixture_config(dir / "ignored"));
    const fs::path actual = dir / "env_out";
    auto prep = run_cli("prepare-data --config " + cfg.string(),
                        "GANBENCH_OUTPUT=" + actual.string());
    CHECK(prep.code == 0);
    CHECK(fs::exists(actual / "dataset/manifest.json"));
    CHECK_FALSE(fs::exists(dir / "ignored"));
}
