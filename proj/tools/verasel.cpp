// verasel: key generation, scenario simulation, transcript verification,
// and the statistical validation experiment. Batch operation only; all
// randomness flows from --rng-seed for reproducibility.

#include <CLI11.hpp>

#include "verasel/cli.hpp"

int main(int argc, char** argv) {
    verasel::crypto_init();

    CLI::App app{"VeraSel: verifiable weighted mixnode selection"};
    app.require_subcommand(1);
    app.footer(
        "Output files:\n"
        "  results.csv   epoch,node_id,weight,selected,round,layer\n"
        "                (one row per roster member per full epoch; round and\n"
        "                 layer are empty for unselected members)\n"
        "  seeds.csv     epoch,seed,provenance,proposer (seed as hex;\n"
        "                 provenance GENESIS|VRF_PROPOSED|FALLBACK)\n"
        "  freq_*.csv    node,weight,count,frequency (per-node selection rate)\n"
        "  cdf_*.csv     value,cdf (plot-ready empirical CDF of frequencies)\n"
        "  board.txt     append-only signed transcript; replayable via verify\n"
        "\n"
        "Exit codes: 0 success/match, 1 usage error, 2 verification mismatch,\n"
        "            3 degenerate epoch.");

    std::string config_path, out_dir = "out", board_file, backend;
    std::uint64_t epoch = 0, rng_seed = 0, trials_a = 0, trials_b = 0;
    std::size_t count = 1;
    double alpha = 0.0;
    bool force = false;

    auto* keygen = app.add_subcommand("keygen", "Generate key files");
    keygen->add_option("--out", out_dir, "Output directory")->required();
    keygen->add_option("--count", count, "Number of key files");
    auto* kg_backend = keygen->add_option("--backend", backend, "ecvrf|mock");
    auto* kg_seed = keygen->add_option("--rng-seed", rng_seed, "Deterministic key material");
    keygen->add_flag("--force", force, "Overwrite existing key files");

    auto* simulate = app.add_subcommand("simulate", "Run a multi-epoch scenario");
    simulate->add_option("--config", config_path, "Scenario config file")->required();
    simulate->add_option("--out", out_dir, "Output directory");
    auto* sim_board = simulate->add_option("--board-file", board_file, "Board transcript path");
    auto* sim_backend = simulate->add_option("--backend", backend, "ecvrf|mock (overrides config)");
    auto* sim_seed = simulate->add_option("--rng-seed", rng_seed, "Overrides config rng seed");

    auto* verify = app.add_subcommand("verify", "Replay and check a transcript");
    verify->add_option("--board-file", board_file, "Board transcript path")->required();
    verify->add_option("--out", out_dir, "Directory with results.csv and seeds.csv");
    auto* ver_epoch = verify->add_option("--epoch", epoch, "Verify a single epoch");

    auto* validate = app.add_subcommand("validate", "KS comparison against the trusted-party oracle");
    validate->add_option("--config", config_path, "Experiment config file")->required();
    validate->add_option("--out", out_dir, "Output directory");
    auto* val_ta = validate->add_option("--trials-a", trials_a, "Protocol-arm trials");
    auto* val_tb = validate->add_option("--trials-b", trials_b, "Oracle-arm trials");
    auto* val_alpha = validate->add_option("--alpha", alpha, "KS significance level");
    auto* val_backend = validate->add_option("--backend", backend, "ecvrf|mock (overrides config)");
    auto* val_seed = validate->add_option("--rng-seed", rng_seed, "Overrides config rng seed");

    CLI11_PARSE(app, argc, argv);

    using namespace verasel::cli;
    if (keygen->parsed()) {
        KeygenOptions opts;
        opts.out_dir = out_dir;
        opts.count = count;
        if (*kg_backend) opts.backend = backend;
        if (*kg_seed) opts.rng_seed = rng_seed;
        opts.force = force;
        return cmd_keygen(opts, std::cout, std::cerr);
    }
    if (simulate->parsed()) {
        SimulateOptions opts;
        opts.config_path = config_path;
        opts.out_dir = out_dir;
        if (*sim_board) opts.board_file = board_file;
        if (*sim_backend) opts.backend_override = backend;
        if (*sim_seed) opts.rng_seed_override = rng_seed;
        return cmd_simulate(opts, std::cout, std::cerr);
    }
    if (verify->parsed()) {
        VerifyOptions opts;
        opts.board_file = board_file;
        opts.out_dir = out_dir;
        if (*ver_epoch) opts.epoch = epoch;
        return cmd_verify(opts, std::cout, std::cerr);
    }
    if (validate->parsed()) {
        ValidateOptions opts;
        opts.config_path = config_path;
        opts.out_dir = out_dir;
        if (*val_ta) opts.trials_a = trials_a;
        if (*val_tb) opts.trials_b = trials_b;
        if (*val_alpha) opts.alpha = alpha;
        if (*val_backend) opts.backend_override = backend;
        if (*val_seed) opts.rng_seed_override = rng_seed;
        return cmd_validate(opts, std::cout, std::cerr);
    }
    return verasel::cli::kExitUsage;
}
