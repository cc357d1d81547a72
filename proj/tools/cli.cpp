#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "deltacnn/deltacnn.hpp"

namespace deltacnn::cli {

namespace fs = std::filesystem;

namespace {

struct GenOptions {
    std::string pattern;
    std::string input;
    std::size_t count = 0;
    std::int64_t dx = 1;
    std::optional<std::uint32_t> label;
    std::size_t canvas = 0;
    std::string out;
};

struct RunOptions {
    std::string model;
    std::string weights;
    std::string seq;
    std::string mode = "delta";
    float tau = 0.0f;
    std::string norm = "l1";
    std::string mark = "recomputed";
    std::string dump_maps;
    std::string csv;
    std::string taus;
};

struct WeightsOptions {
    std::string model;
    std::uint64_t seed = 0;
    std::string out;
};

template <typename T>
std::string shortest(T value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

DeltaPolicy make_policy(const RunOptions& o, float tau) {
    DeltaPolicy p;
    p.tau = tau;
    if (o.norm == "l1") {
        p.norm = Norm::L1;
    } else if (o.norm == "l2") {
        p.norm = Norm::L2;
    } else {
        throw ConfigError("--norm must be l1 or l2");
    }
    const std::string prefix = "valuecompare:";
    if (o.mark == "recomputed") {
        p.mark = MarkMode::Recomputed;
    } else if (o.mark.rfind(prefix, 0) == 0) {
        p.mark = MarkMode::ValueCompare;
        const std::string eps = o.mark.substr(prefix.size());
        const auto [ptr, ec] = std::from_chars(eps.data(), eps.data() + eps.size(), p.epsilon);
        if (ec != std::errc{} || ptr != eps.data() + eps.size()) {
            throw ConfigError("--mark valuecompare:EPS needs a numeric epsilon");
        }
    } else {
        throw ConfigError("--mark must be recomputed or valuecompare:EPS");
    }
    p.validate();
    return p;
}

NetworkSpec load_network(const RunOptions& o) {
    NetworkSpec net = load_model_spec(o.model);
    load_weights(o.weights, net);
    return net;
}

// Writes to --csv when given, else to `out`.
class CsvSink {
public:
    CsvSink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
            if (!*file_) throw FormatError("cannot create " + path);
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }

    void close() {
        stream_->flush();
        if (!*stream_) throw FormatError("failed writing CSV output");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
    Tensor base = read_pgm(o.input);
    if (o.canvas > 0) base = embed_centered(base, o.canvas, o.canvas);
    if (o.count == 0) throw ConfigError("--count must be >= 1");
    const FrameSequence seq = o.pattern == "repeat" ? gen_repeat(base, o.count, o.label)
                                                    : gen_shift(base, o.count, o.dx, o.label);
    write_fseq(seq, o.out);
    const Shape& s = seq.frames.front().shape();
    out << seq.frames.size() << " frames " << s.channels << "x" << s.height << "x" << s.width
        << " -> " << o.out << '\n';
    return 0;
}

void dump_maps(const fs::path& dir, std::size_t frame_idx, const std::vector<NamedMap>& maps,
               const NetworkSpec& net) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_%03zu.pgm", frame_idx);
    for (const NamedMap& m : maps) {
        // Pointwise layers repeat their input map; only windowed layers are dumped.
        const auto it = std::find_if(net.layers.begin(), net.layers.end(),
                                     [&](const LayerSpec& l) { return l.name == m.layer_name; });
        if (it != net.layers.end() && it->is<ReluLayer>()) continue;
        write_pgm(m.map, dir / (m.layer_name + suffix));
    }
}

int cmd_run(const RunOptions& o, std::ostream& out) {
    const NetworkSpec net = load_network(o);
    const FrameSequence seq = read_fseq(o.seq);
    if (seq.frames.front().shape() != net.input_shape) {
        throw ConfigError("sequence frame shape does not match the model input shape");
    }
    const bool delta = o.mode == "delta";
    const DeltaPolicy policy = make_policy(o, o.tau);
    const EngineMode mode = delta ? EngineMode::delta(policy) : EngineMode::dense();

    MapSink sink;
    if (!o.dump_maps.empty()) {
        if (!delta) throw ConfigError("--dump-maps requires --mode delta");
        fs::create_directories(o.dump_maps);
        sink = [&](std::size_t idx, const std::vector<NamedMap>& maps) {
            dump_maps(o.dump_maps, idx, maps, net);
        };
    }
    const RunMetrics metrics = run_sequence(net, seq.frames, mode, seq.labels, sink);

    CsvSink csv(o.csv, out);
    const std::string tau = delta ? shortest(o.tau) : "n/a";
    const std::vector<LayerRecord>& layout = metrics.frames().front().layers;
    *csv << "frame_idx,mode,tau,prediction,label,correct,wall_micros";
    for (const LayerRecord& l : layout) {
        *csv << ',' << l.layer_name << "_recomputed," << l.layer_name << "_total,"
             << l.layer_name << "_actual_macs," << l.layer_name << "_dense_macs";
    }
    *csv << '\n';

    std::vector<LayerRecord> sums(layout);
    for (LayerRecord& s : sums) s = LayerRecord{s.layer_name};
    for (const FrameRecord& f : metrics.frames()) {
        *csv << f.frame_idx << ',' << o.mode << ',' << tau << ',' << f.prediction << ',';
        if (f.label) *csv << *f.label << ',' << (f.correct() ? 1 : 0);
        else *csv << ',';
        *csv << ',' << f.wall_micros;
        for (std::size_t i = 0; i < f.layers.size(); ++i) {
            const LayerRecord& l = f.layers[i];
            *csv << ',' << l.recomputed_positions << ',' << l.total_positions << ','
                 << l.actual_macs << ',' << l.dense_macs;
            sums[i].recomputed_positions += l.recomputed_positions;
            sums[i].total_positions += l.total_positions;
            sums[i].actual_macs += l.actual_macs;
            sums[i].dense_macs += l.dense_macs;
        }
        *csv << '\n';
    }
    const std::optional<double> acc = accuracy(metrics);
    *csv << "-1," << o.mode << ',' << tau << ",,," << (acc ? shortest(*acc) : "n/a") << ','
         << metrics.total_wall_micros();
    for (const LayerRecord& s : sums) {
        *csv << ',' << s.recomputed_positions << ',' << s.total_positions << ',' << s.actual_macs
             << ',' << s.dense_macs;
    }
    *csv << '\n';
    csv.close();
    return 0;
}

int cmd_sweep(const RunOptions& o, std::ostream& out) {
    const NetworkSpec net = load_network(o);
    const FrameSequence seq = read_fseq(o.seq);
    if (seq.frames.front().shape() != net.input_shape) {
        throw ConfigError("sequence frame shape does not match the model input shape");
    }
    const std::vector<float> taus = parse_tau_list(o.taus);
    CsvSink csv(o.csv, out);
    *csv << "tau,accuracy,total_actual_macs,savings_ratio,wall_micros\n";
    for (float tau : taus) {
        const RunMetrics m =
            run_sequence(net, seq.frames, EngineMode::delta(make_policy(o, tau)), seq.labels);
        const std::optional<double> acc = accuracy(m);
        *csv << shortest(tau) << ',' << (acc ? shortest(*acc) : "n/a") << ','
             << m.total_actual_macs() << ',' << shortest(compute_savings(m)) << ','
             << m.total_wall_micros() << '\n';
    }
    csv.close();
    return 0;
}

int cmd_weights(const WeightsOptions& o, std::ostream& out) {
    NetworkSpec net = load_model_spec(o.model);
    generate_weights(net, o.seed);
    save_weights(net, o.out);
    out << "weights seed " << o.seed << " -> " << o.out << '\n';
    return 0;
}

void add_network_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--model", o.model, "Model spec file")->required();
    cmd->add_option("--weights", o.weights, "NNW1 weights file")->required();
    cmd->add_option("--seq", o.seq, "FSEQ frame sequence")->required();
    cmd->add_option("--norm", o.norm, "Receptive-field norm: l1 or l2")
        ->check(CLI::IsMember({"l1", "l2"}));
    cmd->add_option("--mark", o.mark, "Change marking: recomputed or valuecompare:EPS");
    cmd->add_option("--csv", o.csv, "CSV output path (stdout when omitted)");
}

}  // namespace

std::vector<float> parse_tau_list(const std::string& text) {
    std::vector<float> taus;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        float v = 0.0f;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw ConfigError("invalid tau '" + item + "'");
        }
        if (!std::isfinite(v) || v < 0.0f) throw ConfigError("tau must be finite and >= 0");
        taus.push_back(v);
    }
    if (taus.empty()) throw ConfigError("--taus needs at least one value");
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    return taus;
}

std::string format_number(double value) { return shortest(value); }
std::string format_number(float value) { return shortest(value); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Incremental (delta) CNN inference over frame sequences", "deltacnn"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a repeated or shifted frame sequence");
    gen_cmd->add_option("pattern", gen.pattern, "repeat or shift")
        ->required()
        ->check(CLI::IsMember({"repeat", "shift"}));
    gen_cmd->add_option("--input", gen.input, "Base PGM image")->required();
    gen_cmd->add_option("--count", gen.count, "Number of frames")->required();
    gen_cmd->add_option("--dx", gen.dx, "Horizontal shift per frame (shift only)");
    gen_cmd->add_option("--label", gen.label, "Class label attached to every frame");
    gen_cmd->add_option("--canvas", gen.canvas, "Center the input on an NxN black canvas");
    gen_cmd->add_option("--out", gen.out, "Output FSEQ path")->required();

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Run the dense or delta engine over a sequence");
    add_network_options(run_cmd, run_opts);
    run_cmd->add_option("--mode", run_opts.mode, "dense or delta")
        ->check(CLI::IsMember({"dense", "delta"}));
    run_cmd->add_option("--tau", run_opts.tau, "Change threshold");
    run_cmd->add_option("--dump-maps", run_opts.dump_maps, "Directory for per-layer change maps");

    RunOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the delta engine once per tau");
    add_network_options(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--taus", sweep_opts.taus, "Comma-separated tau values")->required();

    WeightsOptions weights;
    auto* weights_cmd = app.add_subcommand("weights", "Weight file utilities");
    weights_cmd->require_subcommand(1);
    auto* weights_gen = weights_cmd->add_subcommand("gen", "Generate seeded fixture weights");
    weights_gen->add_option("--model", weights.model, "Model spec file")->required();
    weights_gen->add_option("--seed", weights.seed, "Generator seed")->required();
    weights_gen->add_option("--out", weights.out, "Output NNW1 path")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        // --help exits 0; usage errors exit 2, runtime errors 1.
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (*gen_cmd) return cmd_gen(gen, out);
        if (*run_cmd) return cmd_run(run_opts, out);
        if (*sweep_cmd) return cmd_sweep(sweep_opts, out);
        if (*weights_gen) return cmd_weights(weights, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << "error: no command given\n";
    return 1;
}

}  // namespace deltacnn::cli
