#include "crackpot/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "crackpot/gradcheck.hpp"
#include "crackpot/pipeline.hpp"
#include "crackpot/pnm.hpp"
#include "crackpot/synthetic.hpp"
#include "crackpot/train.hpp"
#include "crackpot/weights.hpp"

namespace fs = std::filesystem;

namespace crackpot {

namespace {

long long parse_int_value(const std::string& v) {
    std::size_t pos = 0;
    long long out;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected an integer");
    }
    if (pos != v.size()) throw std::invalid_argument("expected an integer");
    return out;
}

double parse_double_value(const std::string& v) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected a number");
    }
    if (pos != v.size()) throw std::invalid_argument("expected a number");
    return out;
}

bool parse_bool_value(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("expected true/false");
}

struct KeyDef {
    bool is_bool = false;
    std::function<void(RunConfig&, const std::string&)> set;
};

const std::map<std::string, KeyDef>& key_table() {
    static const std::map<std::string, KeyDef> table = [] {
        std::map<std::string, KeyDef> t;
        auto str = [&](const char* name, std::string RunConfig::* field) {
            t[name] = {false, [field](RunConfig& c, const std::string& v) { c.*field = v; }};
        };
        auto integer = [&](const char* name, int RunConfig::* field) {
            t[name] = {false, [field](RunConfig& c, const std::string& v) {
                           c.*field = static_cast<int>(parse_int_value(v));
                       }};
        };
        auto uinteger = [&](const char* name, unsigned RunConfig::* field) {
            t[name] = {false, [field](RunConfig& c, const std::string& v) {
                           const long long x = parse_int_value(v);
                           if (x < 0) throw std::invalid_argument("expected a non-negative integer");
                           c.*field = static_cast<unsigned>(x);
                       }};
        };
        auto real = [&](const char* name, double RunConfig::* field) {
            t[name] = {false, [field](RunConfig& c, const std::string& v) {
                           c.*field = parse_double_value(v);
                       }};
        };
        auto boolean = [&](const char* name, bool RunConfig::* field) {
            t[name] = {true, [field](RunConfig& c, const std::string& v) {
                           c.*field = parse_bool_value(v);
                       }};
        };

        str("input", &RunConfig::input);
        str("weights", &RunConfig::weights);
        str("out", &RunConfig::out);
        str("data", &RunConfig::data);
        boolean("overlay", &RunConfig::overlay);
        boolean("timings", &RunConfig::timings);
        integer("threads", &RunConfig::threads);
        integer("canny_low", &RunConfig::canny_low);
        integer("canny_high", &RunConfig::canny_high);
        integer("dilate_iterations", &RunConfig::dilate_iterations);
        integer("min_area", &RunConfig::min_area);
        integer("patch_size", &RunConfig::patch_size);
        real("score_threshold", &RunConfig::score_threshold);
        integer("max_candidates", &RunConfig::max_candidates);
        str("road_mask_kind", &RunConfig::road_mask_kind);
        str("road_mask_pattern", &RunConfig::road_mask_pattern);
        str("road_mask_corners", &RunConfig::road_mask_corners);
        integer("in_channels", &RunConfig::in_channels);
        integer("conv1_filters", &RunConfig::conv1_filters);
        integer("fire2_squeeze", &RunConfig::fire2_squeeze);
        integer("fire2_expand", &RunConfig::fire2_expand);
        integer("fire3_squeeze", &RunConfig::fire3_squeeze);
        integer("fire3_expand", &RunConfig::fire3_expand);
        integer("fire4_squeeze", &RunConfig::fire4_squeeze);
        integer("fire4_expand", &RunConfig::fire4_expand);
        integer("codewords", &RunConfig::codewords);
        real("lr", &RunConfig::lr);
        integer("batch", &RunConfig::batch);
        integer("epochs", &RunConfig::epochs);
        real("beta1", &RunConfig::beta1);
        uinteger("seed", &RunConfig::seed);
        integer("frames", &RunConfig::frames);
        return t;
    }();
    return table;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

void apply_config_file(const std::string& path, RunConfig& cfg, std::set<std::string>& set_keys) {
    std::ifstream in(path);
    if (!in) throw UsageError("cli.parse_cli: cannot open config file " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw UsageError("cli.parse_cli: " + path + " line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = key_table().find(key);
        if (it == key_table().end())
            throw UsageError("cli.parse_cli: " + path + " line " + std::to_string(line_no) +
                             ": unknown key '" + key + "'");
        try {
            it->second.set(cfg, value);
        } catch (const std::invalid_argument& e) {
            throw UsageError("cli.parse_cli: " + path + " line " + std::to_string(line_no) +
                             ": bad value for '" + key + "': " + e.what());
        }
        set_keys.insert(key);
    }
}

std::string flag_to_key(const std::string& flag) {
    std::string key = flag.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

RoadMaskSource road_source_from(const RunConfig& cfg) {
    RoadMaskSource src;
    if (cfg.road_mask_kind == "full-frame") {
        src.kind = RoadMaskKind::FullFrame;
    } else if (cfg.road_mask_kind == "external-file") {
        src.kind = RoadMaskKind::ExternalFile;
        src.file_pattern = cfg.road_mask_pattern;
    } else if (cfg.road_mask_kind == "fixed-trapezoid") {
        src.kind = RoadMaskKind::FixedTrapezoid;
        std::stringstream ss(cfg.road_mask_corners);
        std::string token;
        std::vector<double> values;
        while (std::getline(ss, token, ','))
            values.push_back(parse_double_value(trim(token)));
        if (values.size() != 8)
            throw UsageError("cli.run: road_mask_corners needs 8 comma-separated fractions");
        for (int i = 0; i < 4; ++i) src.corners[static_cast<std::size_t>(i)] = {values[static_cast<std::size_t>(2 * i)], values[static_cast<std::size_t>(2 * i + 1)]};
    } else {
        throw UsageError("cli.run: unknown road_mask_kind '" + cfg.road_mask_kind + "'");
    }
    return src;
}

PipelineConfig pipeline_config_from(const RunConfig& cfg) {
    PipelineConfig p;
    p.canny_low = cfg.canny_low;
    p.canny_high = cfg.canny_high;
    p.dilate_iterations = cfg.dilate_iterations;
    p.min_area = cfg.min_area;
    p.patch_size = cfg.patch_size;
    p.score_threshold = cfg.score_threshold;
    p.max_candidates = cfg.max_candidates;
    p.validate();
    return p;
}

NetworkConfig network_config_from(const RunConfig& cfg) {
    NetworkConfig n;
    n.in_channels = cfg.in_channels;
    n.patch_size = cfg.patch_size;
    n.conv1_filters = cfg.conv1_filters;
    n.fire2_squeeze = cfg.fire2_squeeze;
    n.fire2_expand = cfg.fire2_expand;
    n.fire3_squeeze = cfg.fire3_squeeze;
    n.fire3_expand = cfg.fire3_expand;
    n.fire4_squeeze = cfg.fire4_squeeze;
    n.fire4_expand = cfg.fire4_expand;
    n.codewords = cfg.codewords;
    n.validate();
    return n;
}

// Frame list for detect: a single image file or a directory of .pgm/.ppm
// frames in lexicographic order.
std::vector<std::string> resolve_frame_paths(const std::string& input) {
    if (input.empty()) throw UsageError("cli.run: detect requires --input");
    if (fs::is_directory(input)) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(input)) {
            if (!entry.is_regular_file()) continue;
            const std::string ext = entry.path().extension().string();
            if (ext == ".pgm" || ext == ".ppm") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        return files;
    }
    if (!fs::exists(input)) throw NotFoundError("cli.run: input not found: " + input);
    return {input};
}

int run_detect(const RunConfig& cfg) {
    if (cfg.weights.empty()) throw UsageError("cli.run: detect requires --weights");
    auto [params, net_cfg] = load_weights(cfg.weights);
    const PipelineConfig pipe_cfg = pipeline_config_from(cfg);
    const RoadMaskSource road_src = road_source_from(cfg);
    const std::vector<std::string> paths = resolve_frame_paths(cfg.input);

    const FrameSource source = [&](int i) { return read_pnm(paths[static_cast<std::size_t>(i)]); };
    const SequenceResult result = run_sequence(source, static_cast<int>(paths.size()), road_src,
                                               params, pipe_cfg, net_cfg, cfg.threads);

    fs::create_directories(cfg.out);
    const std::string csv_path = (fs::path(cfg.out) / "detections.csv").string();
    write_detections_csv(csv_path, result.frames);

    if (cfg.overlay) {
        for (const FrameResult& fr : result.frames) {
            const Image frame = source(fr.frame_index);
            const Image painted = render_overlay(frame, fr);
            const std::string name = "overlay_" + std::to_string(fr.frame_index) + ".ppm";
            write_pnm((fs::path(cfg.out) / name).string(), painted);
        }
    }
    if (cfg.timings) std::fputs(timing_summary_csv(result.summary).c_str(), stdout);

    std::size_t detections = 0;
    for (const FrameResult& fr : result.frames) detections += fr.detections.size();
    std::fprintf(stderr, "detect: %d frame(s), %zu candidate row(s), %.1f fps -> %s\n",
                 result.summary.frames, detections, result.summary.fps, csv_path.c_str());
    return 0;
}

int run_train(const RunConfig& cfg) {
    if (cfg.data.empty()) throw UsageError("cli.run: train requires --data");
    const std::vector<LabeledPatch> dataset = load_patch_dataset(cfg.data);
    const NetworkConfig net_cfg = network_config_from(cfg);
    TrainHyper hyper;
    hyper.lr = cfg.lr;
    hyper.batch = cfg.batch;
    hyper.epochs = cfg.epochs;
    hyper.beta1 = cfg.beta1;
    hyper.seed = cfg.seed;

    const TrainResult result = train(dataset, net_cfg, hyper);

    fs::create_directories(cfg.out);
    const std::string weights_path =
        cfg.weights.empty() ? (fs::path(cfg.out) / "weights.cpot").string() : cfg.weights;
    save_weights(weights_path, result.params, net_cfg);
    const std::string log_path = (fs::path(cfg.out) / "train_log.csv").string();
    write_train_log_csv(log_path, result.log);

    for (const EpochStats& e : result.log)
        std::fprintf(stderr, "epoch %d: loss %.6f, accuracy %.6f\n", e.epoch, e.mean_loss,
                     e.accuracy);
    std::fprintf(stderr, "train: %zu patches, %d epochs -> %s\n", dataset.size(), cfg.epochs,
                 weights_path.c_str());
    return 0;
}

int run_eval(const RunConfig& cfg) {
    if (cfg.data.empty()) throw UsageError("cli.run: eval requires --data");
    if (cfg.weights.empty()) throw UsageError("cli.run: eval requires --weights");
    const std::vector<LabeledPatch> dataset = load_patch_dataset(cfg.data);
    auto [params, net_cfg] = load_weights(cfg.weights);
    const MetricsReport report = evaluate(dataset, params, net_cfg, cfg.score_threshold);
    std::printf("tp,fp,tn,fn,precision,recall,f1,accuracy,degenerate\n");
    std::printf("%lld,%lld,%lld,%lld,%.6f,%.6f,%.6f,%.6f,%d\n", report.tp, report.fp, report.tn,
                report.fn, report.precision, report.recall, report.f1, report.accuracy,
                report.degenerate ? 1 : 0);
    return 0;
}

int run_gradcheck(const RunConfig& cfg) {
    const GradCheckResult result = gradient_check(small_gradcheck_config(), cfg.seed);
    std::printf("max_relative_error,%.8g\n", result.max_rel_error);
    std::fprintf(stderr, "gradcheck: %zu coordinates, worst %s[%zu]\n", result.checked,
                 result.worst_tensor.c_str(), result.worst_index);
    return result.max_rel_error < 1e-4 ? 0 : 1;
}

int run_bench(const RunConfig& cfg) {
    if (cfg.frames < 1) throw UsageError("cli.run: bench requires frames >= 1");
    const NetworkConfig net_cfg = network_config_from(cfg);
    NetworkParams params;
    if (!cfg.weights.empty()) {
        auto loaded = load_weights(cfg.weights);
        params = std::move(loaded.first);
    } else {
        params = init_params<float>(net_cfg, cfg.seed);
    }
    const PipelineConfig pipe_cfg = pipeline_config_from(cfg);

    std::mt19937 gen(cfg.seed);
    std::vector<Image> frames;
    frames.reserve(static_cast<std::size_t>(cfg.frames));
    for (int i = 0; i < cfg.frames; ++i)
        frames.push_back(make_crack_frame(gen, 640, 480).frame);

    RoadMaskSource road_src;  // full frame
    const FrameSource source = [&](int i) { return frames[static_cast<std::size_t>(i)]; };
    // single-threaded by construction: the throughput claim is per core
    const SequenceResult result =
        run_sequence(source, cfg.frames, road_src, params, pipe_cfg, net_cfg, 1);

    double preproc_us_total = 0.0;
    long long candidates = 0;
    double classify_us_total = 0.0;
    for (const FrameResult& fr : result.frames) {
        preproc_us_total += double(fr.timings.edge_us + fr.timings.dilate_us +
                                   fr.timings.combine_us + fr.timings.contours_us);
        candidates += fr.candidate_count;
        classify_us_total += double(fr.timings.classify_us);
    }
    const double preproc_fps =
        preproc_us_total > 0.0 ? 1e6 * double(cfg.frames) / preproc_us_total : 0.0;
    const double per_candidate_us =
        candidates > 0 ? classify_us_total / double(candidates) : 0.0;

    std::fputs(timing_summary_csv(result.summary).c_str(), stdout);
    std::printf("preprocessing_fps,%.1f\n", preproc_fps);
    std::printf("classify_per_candidate_us,%.1f\n", per_candidate_us);
    return 0;
}

}  // namespace

ParsedCli parse_cli(const std::vector<std::string>& args) {
    if (args.empty())
        throw UsageError("cli.parse_cli: missing command (detect|train|eval|gradcheck|bench)");

    ParsedCli parsed;
    const std::string& cmd = args[0];
    if (cmd == "detect") parsed.command = Command::Detect;
    else if (cmd == "train") parsed.command = Command::Train;
    else if (cmd == "eval") parsed.command = Command::Eval;
    else if (cmd == "gradcheck") parsed.command = Command::GradCheck;
    else if (cmd == "bench") parsed.command = Command::Bench;
    else throw UsageError("cli.parse_cli: unknown command '" + cmd + "'");

    // collect flag tokens first; config file values apply before flags
    std::vector<std::pair<std::string, std::string>> flag_values;  // key, value
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& arg = args[i];
        if (arg.size() < 3 || arg[0] != '-' || arg[1] != '-')
            throw UsageError("cli.parse_cli: unexpected argument '" + arg + "'");
        const std::string key = flag_to_key(arg);
        if (key == "config") {
            if (i + 1 >= args.size())
                throw UsageError("cli.parse_cli: --config requires a path");
            config_path = args[++i];
            continue;
        }
        const auto it = key_table().find(key);
        if (it == key_table().end())
            throw UsageError("cli.parse_cli: unknown flag '" + arg + "'");
        if (it->second.is_bool) {
            flag_values.emplace_back(key, "true");
        } else {
            if (i + 1 >= args.size())
                throw UsageError("cli.parse_cli: flag '" + arg + "' requires a value");
            flag_values.emplace_back(key, args[++i]);
        }
    }

    std::set<std::string> set_keys;
    if (!config_path.empty()) apply_config_file(config_path, parsed.cfg, set_keys);
    for (const auto& [key, value] : flag_values) {
        try {
            key_table().at(key).set(parsed.cfg, value);
        } catch (const std::invalid_argument& e) {
            throw UsageError("cli.parse_cli: bad value for '" + key + "': " + e.what());
        }
        set_keys.insert(key);
    }

    if (!set_keys.count("threads")) {
        if (const char* env = std::getenv("CRACKPOT_THREADS")) {
            try {
                parsed.cfg.threads = static_cast<int>(parse_int_value(env));
            } catch (const std::invalid_argument&) {
                throw UsageError("cli.parse_cli: bad value in CRACKPOT_THREADS");
            }
        }
    }
    return parsed;
}

int run(Command command, const RunConfig& cfg) {
    switch (command) {
        case Command::Detect: return run_detect(cfg);
        case Command::Train: return run_train(cfg);
        case Command::Eval: return run_eval(cfg);
        case Command::GradCheck: return run_gradcheck(cfg);
        case Command::Bench: return run_bench(cfg);
    }
    throw UsageError("cli.run: unknown command");
}

int cli_main(const std::vector<std::string>& args) {
    if (!args.empty() && (args[0] == "help" || args[0] == "--help" || args[0] == "-h")) {
        std::fputs(usage_text().c_str(), stdout);
        return 0;
    }
    try {
        const ParsedCli parsed = parse_cli(args);
        return run(parsed.command, parsed.cfg);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "%s\n\n%s", e.what(), usage_text().c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
}

std::string usage_text() {
    return
        "usage: crackpot <command> [--flag value ...] [--config file]\n"
        "\n"
        "commands:\n"
        "  detect     classify candidate regions in frames   (--input, --weights)\n"
        "  train      train the classifier on labeled patches (--data)\n"
        "  eval       report precision/recall/F1/accuracy     (--data, --weights)\n"
        "  gradcheck  verify gradients against finite differences\n"
        "  bench      time the pipeline on synthetic 640x480 frames\n"
        "\n"
        "keys (flags are kebab-case, e.g. --canny-low; config lines are 'key = value'):\n"
        "  input, weights, out (.), data, overlay (false), timings (false), threads (1)\n"
        "  canny_low (50), canny_high (150), dilate_iterations (3), min_area (80)\n"
        "  patch_size (64), score_threshold (0.5), max_candidates (64)\n"
        "  road_mask_kind (full-frame|external-file|fixed-trapezoid), road_mask_pattern,\n"
        "  road_mask_corners (8 fractions)\n"
        "  in_channels (3), conv1_filters (32), fire2_squeeze (16), fire2_expand (32),\n"
        "  fire3_squeeze (16), fire3_expand (32), fire4_squeeze (32), fire4_expand (64),\n"
        "  codewords (32)\n"
        "  lr (1e-5), batch (64), epochs (20), beta1 (0.9), seed (1), frames (100)\n"
        "\n"
        "environment: CRACKPOT_THREADS is used when --threads is not given.\n";
}

}  // namespace crackpot
