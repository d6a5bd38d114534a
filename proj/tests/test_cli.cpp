#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
    const std::string cmd = std::string(QLIDAR_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("qlidar_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::set<std::string> files_in(const fs::path& dir) {
    std::set<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
    return out;
}

}  // namespace

TEST_CASE("validate exit codes") {
    const auto dir = scratch("validate");
    std::ofstream(dir / "good.cfg") << "frame_length = 4096\nrng_seed = 9\n";
    std::ofstream(dir / "unknown.cfg") << "frame_lenght = 4096\n";
    std::ofstream(dir / "invalid.cfg") << "channel_transmittance = 0\n";
    CHECK(cli("validate --config " + (dir / "good.cfg").string()) == 0);
    CHECK(cli("validate --config " + (dir / "unknown.cfg").string()) == 1);
    CHECK(cli("validate --config " + (dir / "invalid.cfg").string()) == 1);
    CHECK(cli("validate --config " + (dir / "missing.cfg").string()) == 1);
    CHECK(cli("validate --no-such-flag") == 1);
    CHECK(cli("") == 1);
    fs::remove_all(dir);
}

TEST_CASE("run writes the documented files") {
    const auto dir = scratch("run");
    CHECK(cli("run --scenario spoofed --seed 4 --verbose --out " + (dir / "out").string()) == 0);
    const auto files = files_in(dir / "out");
    for (const char* f : {"results.csv", "roc.csv", "profile.csv", "manifest.txt", "frame.csv"})
        CHECK(files.count(f));
    CHECK(cli("run --scenario neither --out " + (dir / "x").string()) == 1);
    fs::remove_all(dir);
}

TEST_CASE("ensemble of both scenarios") {
    const auto dir = scratch("ensemble");
    std::ofstream(dir / "small.cfg") << "frame_length = 2048\nranging_length = 1024\n";
    const auto out = dir / "out";
    CHECK(cli("ensemble --config " + (dir / "small.cfg").string() +
              " --scenario both --trials 8 --parallel 2 --out " + out.string()) == 0);
    std::ifstream roc(out / "roc.csv");
    std::string text((std::istreambuf_iterator<char>(roc)), {});
    CHECK(text.find(",security,montecarlo") != std::string::npos);
    CHECK(text.find(",target,analytic") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("figure and sweep verbs") {
    const auto dir = scratch("fig");
    CHECK(cli("fig8 --out " + (dir / "f8").string()) == 0);
    std::ifstream table(dir / "f8" / "table.csv");
    std::string header;
    std::getline(table, header);
    CHECK(header == "x,y,series");
    std::set<std::string> series;
    for (std::string line; std::getline(table, line);) series.insert(line.substr(line.rfind(',') + 1));
    CHECK(series == std::set<std::string>{"gamma=0.1", "gamma=0.2", "gamma=0.3"});

    CHECK(cli("sweep --variable gain --formula snr_ratio --from 0.01 --to 1 --out " +
              (dir / "s").string()) == 0);
    CHECK(cli("sweep --variable nothing --out " + (dir / "s2").string()) == 1);
    fs::remove_all(dir);
}
