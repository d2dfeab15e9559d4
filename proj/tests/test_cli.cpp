#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "verasel/cli.hpp"

using namespace verasel;
using namespace verasel::cli;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

void write_text(const std::filesystem::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::trunc | std::ios::binary);
    out << text;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_simulate(const std::filesystem::path& config,
                 const std::filesystem::path& out_dir) {
    SimulateOptions opts;
    opts.config_path = config;
    opts.out_dir = out_dir;
    std::ostringstream out, err;
    int rc = cmd_simulate(opts, out, err);
    INFO(err.str());
    return rc;
}

int run_verify(const std::filesystem::path& board,
               const std::filesystem::path& out_dir,
               std::string* log = nullptr) {
    VerifyOptions opts;
    opts.board_file = board;
    opts.out_dir = out_dir;
    std::ostringstream out, err;
    int rc = cmd_verify(opts, out, err);
    if (log) *log = out.str() + err.str();
    return rc;
}

}  // namespace

TEST_CASE("keygen writes parseable key files and respects --force") {
    crypto_init();
    TempDir dir("verasel_cli_keygen");
    KeygenOptions opts;
    opts.out_dir = dir.path;
    opts.count = 2;
    opts.backend = "ecvrf";
    opts.rng_seed = 9;

    std::ostringstream out, err;
    CHECK(cmd_keygen(opts, out, err) == kExitOk);
    LoadedKey k0 = load_key_file(dir.path / "key_0000.txt");
    CHECK(k0.backend_name == "ecvrf");
    LoadedKey k1 = load_key_file(dir.path / "key_0001.txt");
    CHECK(k0.keys.public_key != k1.keys.public_key);

    // Existing files without --force: refused.
    CHECK(cmd_keygen(opts, out, err) == kExitUsage);
    opts.force = true;
    CHECK(cmd_keygen(opts, out, err) == kExitOk);

    // count = 0 writes nothing, successfully.
    KeygenOptions none;
    none.out_dir = dir.path / "empty";
    none.count = 0;
    CHECK(cmd_keygen(none, out, err) == kExitOk);
    CHECK(std::filesystem::is_empty(none.out_dir));
}

TEST_CASE("simulate writes a verifiable transcript") {
    TempDir dir("verasel_cli_sim");
    auto config = dir.path / "scenario.cfg";
    write_text(config,
               "nodes = 10\n"
               "epochs = 2\n"
               "tau = 1/2\n"
               "layers = 2\n"
               "backend = mock\n"
               "rng_seed = 21\n"
               "clients = 3\n");
    auto out_dir = dir.path / "out";
    CHECK(run_simulate(config, out_dir) == kExitOk);

    std::string results = read_text(out_dir / "results.csv");
    CHECK(results.find("epoch,node_id,weight,selected,round,layer") != std::string::npos);
    // Two full epochs of ten member rows each.
    CHECK(std::count(results.begin(), results.end(), '\n') == 2 + 20);

    std::string seeds = read_text(out_dir / "seeds.csv");
    CHECK(seeds.find("GENESIS") != std::string::npos);
    CHECK(seeds.find("FALLBACK") != std::string::npos);   // epoch 1
    CHECK(seeds.find("VRF_PROPOSED") != std::string::npos);  // epoch 2

    std::string log;
    CHECK(run_verify(out_dir / "board.txt", out_dir, &log) == kExitOk);
    CHECK(log.find("epoch 1: match") != std::string::npos);
    CHECK(log.find("epoch 2: match") != std::string::npos);
    CHECK(log.find("mismatch") == std::string::npos);
}

TEST_CASE("verify rejects corrupted transcripts and results") {
    TempDir dir("verasel_cli_corrupt");
    auto config = dir.path / "scenario.cfg";
    write_text(config,
               "nodes = 6\nepochs = 2\ntau = 1/2\nlayers = 1\nbackend = mock\n"
               "rng_seed = 33\n");
    auto out_dir = dir.path / "out";
    REQUIRE(run_simulate(config, out_dir) == kExitOk);

    SECTION("board payload byte flip is caught and the author named") {
        std::string board = read_text(out_dir / "board.txt");
        // Flip a hex digit inside the first entry's payload column.
        auto pos = board.find("entry ");
        for (int field = 0; field < 5; ++field) pos = board.find(' ', pos) + 1;
        std::string corrupted = board;
        corrupted[pos] = corrupted[pos] == '0' ? '1' : '0';
        write_text(out_dir / "board.txt", corrupted);
        std::string log;
        CHECK(run_verify(out_dir / "board.txt", out_dir, &log) == kExitMismatch);
        CHECK(log.find("sequence 0") != std::string::npos);
    }

    SECTION("results row corruption is a per-epoch mismatch") {
        std::string results = read_text(out_dir / "results.csv");
        auto pos = results.rfind(",1,");  // a selected flag somewhere near the end
        REQUIRE(pos != std::string::npos);
        std::string corrupted = results;
        corrupted[pos + 1] = '0';
        write_text(out_dir / "results.csv", corrupted);
        std::string log;
        CHECK(run_verify(out_dir / "board.txt", out_dir, &log) == kExitMismatch);
        CHECK(log.find("mismatch") != std::string::npos);
    }

    SECTION("seed file corruption is caught") {
        std::string seeds = read_text(out_dir / "seeds.csv");
        auto pos = seeds.find("FALLBACK");
        std::string corrupted = seeds;
        corrupted[pos] = 'G';
        write_text(out_dir / "seeds.csv", corrupted);
        CHECK(run_verify(out_dir / "board.txt", out_dir) == kExitMismatch);
    }
}

TEST_CASE("missing seed proposals verify via the fallback path") {
    TempDir dir("verasel_cli_fallback");
    auto config = dir.path / "scenario.cfg";
    write_text(config,
               "nodes = 5\nepochs = 3\ntau = 1/2\nlayers = 1\nbackend = mock\n"
               "rng_seed = 44\nproposer = never\n");
    auto out_dir = dir.path / "out";
    REQUIRE(run_simulate(config, out_dir) == kExitOk);
    std::string seeds = read_text(out_dir / "seeds.csv");
    CHECK(seeds.find("VRF_PROPOSED") == std::string::npos);
    CHECK(run_verify(out_dir / "board.txt", out_dir) == kExitOk);
}

TEST_CASE("degenerate scenarios exit with the dedicated code") {
    TempDir dir("verasel_cli_degen");
    auto config = dir.path / "scenario.cfg";
    write_text(config,
               "nodes = 3\nepochs = 1\ntau = 1/2\nlayers = 1\nbackend = mock\n"
               "rng_seed = 5\n"
               "behavior = 0:silent_setup\nbehavior = 1:silent_setup\n"
               "behavior = 2:silent_setup\n");
    CHECK(run_simulate(config, dir.path / "out") == kExitDegenerate);
}

TEST_CASE("config errors carry line numbers") {
    TempDir dir("verasel_cli_cfgerr");
    auto config = dir.path / "bad.cfg";

    write_text(config, "nodes = 5\ntau = 0\n");
    SimulateOptions opts;
    opts.config_path = config;
    opts.out_dir = dir.path / "out";
    std::ostringstream out, err;
    CHECK(cmd_simulate(opts, out, err) == kExitUsage);
    CHECK(err.str().find(":2:") != std::string::npos);

    write_text(config, "nodes = 5\nwat = 9\n");
    std::ostringstream err2;
    CHECK(cmd_simulate(opts, out, err2) == kExitUsage);
    CHECK(err2.str().find("unknown key") != std::string::npos);

    write_text(config, "epochs = 1\n");  // no node source at all
    std::ostringstream err3;
    CHECK(cmd_simulate(opts, out, err3) == kExitUsage);
}

TEST_CASE("simulate is byte-reproducible for a fixed config") {
    TempDir dir("verasel_cli_repro");
    auto config = dir.path / "scenario.cfg";
    write_text(config,
               "nodes = 8\nepochs = 2\ntau = 3/4\nlayers = 2\nbackend = mock\n"
               "rng_seed = 99\nbehavior = 1:bad_proof\n");
    auto out_a = dir.path / "a";
    auto out_b = dir.path / "b";
    REQUIRE(run_simulate(config, out_a) == kExitOk);
    REQUIRE(run_simulate(config, out_b) == kExitOk);
    CHECK(read_text(out_a / "board.txt") == read_text(out_b / "board.txt"));
    CHECK(read_text(out_a / "results.csv") == read_text(out_b / "results.csv"));
    CHECK(read_text(out_a / "seeds.csv") == read_text(out_b / "seeds.csv"));
}

TEST_CASE("validate produces a ks report that accepts at small scale") {
    TempDir dir("verasel_cli_validate");
    auto config = dir.path / "exp.cfg";
    write_text(config,
               "nodes = 20\ntau = 1/2\nbackend = mock\nrng_seed = 7\n"
               "trials_a = 400\ntrials_b = 400\nalpha = 0.05\n");
    ValidateOptions opts;
    opts.config_path = config;
    opts.out_dir = dir.path / "out";
    std::ostringstream out, err;
    REQUIRE(cmd_validate(opts, out, err) == kExitOk);
    std::string report = read_text(opts.out_dir / "ks_report.txt");
    CHECK(report.find("verdict: accept") != std::string::npos);
    CHECK(read_text(opts.out_dir / "freq_verasel.csv").find("node,weight,count,frequency") == 0);
    CHECK(read_text(opts.out_dir / "cdf_oracle.csv").find("value,cdf") == 0);

    // Degenerate single-trial run still produces a report.
    opts.trials_a = 1;
    opts.trials_b = 1;
    opts.out_dir = dir.path / "out1";
    std::ostringstream out1;
    CHECK(cmd_validate(opts, out1, err) == kExitOk);
    CHECK(read_text(opts.out_dir / "ks_report.txt").find("ks_statistic") !=
          std::string::npos);
}
