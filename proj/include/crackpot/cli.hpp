#pragma once

#include <string>
#include <vector>

#include "crackpot/error.hpp"

namespace crackpot {

enum class Command { Detect, Train, Eval, GradCheck, Bench };

// Flat key-value settings shared by every command. Flags are kebab-case
// mirrors of these keys; precedence is flags > config file > defaults.
struct RunConfig {
    // paths and switches
    std::string input;
    std::string weights;
    std::string out = ".";
    std::string data;
    bool overlay = false;
    bool timings = false;
    int threads = 1;  // 1 = deterministic sequential mode

    // candidate generation
    int canny_low = 50;
    int canny_high = 150;
    int dilate_iterations = 3;
    int min_area = 80;
    int patch_size = 64;
    double score_threshold = 0.5;
    int max_candidates = 64;

    // road mask
    std::string road_mask_kind = "full-frame";  // full-frame | external-file | fixed-trapezoid
    std::string road_mask_pattern;
    std::string road_mask_corners = "0.0,0.5,1.0,0.5,1.0,1.0,0.0,1.0";

    // network
    int in_channels = 3;
    int conv1_filters = 32;
    int fire2_squeeze = 16, fire2_expand = 32;
    int fire3_squeeze = 16, fire3_expand = 32;
    int fire4_squeeze = 32, fire4_expand = 64;
    int codewords = 32;

    // training
    double lr = 1e-5;
    int batch = 64;
    int epochs = 20;
    double beta1 = 0.9;
    unsigned seed = 1;

    // bench
    int frames = 100;
};

struct ParsedCli {
    Command command;
    RunConfig cfg;
};

// Parses `<command> [--flag value ...]`, resolving `--config <path>` files of
// `key = value` lines (# comments and blank lines ignored, unknown keys
// rejected). Throws UsageError on any bad command, flag, key, or value.
ParsedCli parse_cli(const std::vector<std::string>& args);

// Executes a parsed command. Module errors propagate as exceptions.
// GradCheck returns 1 when the maximum relative gradient error is >= 1e-4.
int run(Command command, const RunConfig& cfg);

// Process entry point: parse + run with exit codes 0 (success),
// 1 (runtime error), 2 (usage error).
int cli_main(const std::vector<std::string>& args);

// One-screen usage text listing commands, keys, and defaults.
std::string usage_text();

}  // namespace crackpot
