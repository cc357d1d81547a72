#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "deltacnn/errors.hpp"
#include "deltacnn/model.hpp"

namespace deltacnn {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    return tokens;
}

std::size_t parse_count(const std::string& text, std::size_t line_no) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError("model spec line " + std::to_string(line_no) + ": '" + text +
                          "' is not a non-negative integer");
    }
    return value;
}

class Directive {
public:
    Directive(std::vector<std::string> tokens, std::size_t line_no) : line_(line_no) {
        kind_ = tokens.front();
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            const auto eq = tokens[i].find('=');
            if (eq == std::string::npos || eq == 0) error("expected key=value, got '" + tokens[i] + "'");
            if (!args_.emplace(tokens[i].substr(0, eq), tokens[i].substr(eq + 1)).second) {
                error("duplicate key '" + tokens[i].substr(0, eq) + "'");
            }
        }
    }

    const std::string& kind() const { return kind_; }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = {}) {
        const auto it = args_.find(key);
        if (it == args_.end()) {
            if (!fallback) error("missing required key '" + key + "'");
            return *fallback;
        }
        const std::size_t v = parse_count(it->second, line_);
        args_.erase(it);
        return v;
    }

    std::string name(const std::string& fallback) {
        const auto it = args_.find("name");
        if (it == args_.end()) return fallback;
        std::string v = it->second;
        args_.erase(it);
        return v;
    }

    void finish() const {
        if (!args_.empty()) error("unknown key '" + args_.begin()->first + "'");
    }

    [[noreturn]] void error(const std::string& msg) const {
        throw FormatError("model spec line " + std::to_string(line_) + ": " + msg);
    }

private:
    std::string kind_;
    std::map<std::string, std::string> args_;
    std::size_t line_;
};

}  // namespace

NetworkSpec parse_model_spec(std::string_view text) {
    NetworkSpec net;
    bool have_input = false;
    Shape current;
    bool flattened = false;
    std::size_t flat = 0;
    std::map<std::string, std::size_t> counters;
    auto next_name = [&](const std::string& stem) {
        const std::size_t n = ++counters[stem];
        return stem == "flatten" && n == 1 ? stem : stem + std::to_string(n);
    };

    std::istringstream lines{std::string(text)};
    std::size_t line_no = 0;
    for (std::string line; std::getline(lines, line);) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::vector<std::string> tokens = tokenize(line);
        if (tokens.empty()) continue;

        if (tokens.front() == "input") {
            if (have_input || !net.layers.empty()) {
                throw FormatError("model spec line " + std::to_string(line_no) +
                                  ": 'input' must appear once, before any layer");
            }
            if (tokens.size() != 4) {
                throw FormatError("model spec line " + std::to_string(line_no) +
                                  ": expected 'input C H W'");
            }
            net.input_shape = {parse_count(tokens[1], line_no), parse_count(tokens[2], line_no),
                               parse_count(tokens[3], line_no)};
            try {
                validate_shape(net.input_shape);
            } catch (const ShapeError& e) {
                throw FormatError("model spec line " + std::to_string(line_no) + ": " + e.what());
            }
            current = net.input_shape;
            have_input = true;
            continue;
        }

        Directive d(std::move(tokens), line_no);
        if (!have_input) d.error("'input C H W' must come first");
        LayerSpec layer;
        try {
            if (d.kind() == "conv") {
                layer.name = d.name(next_name("conv"));
                ConvGeometry g;
                g.in_channels = current.channels;
                g.out_channels = d.count("out");
                g.kernel = d.count("k");
                g.stride = d.count("s", 1);
                g.padding = d.count("p", 0);
                if (!flattened) current = conv_output_shape(current, g);
                layer.kind = ConvLayer{g, {}};
            } else if (d.kind() == "relu") {
                layer.name = d.name(next_name("relu"));
                layer.kind = ReluLayer{};
            } else if (d.kind() == "maxpool") {
                layer.name = d.name(next_name("pool"));
                PoolGeometry g;
                g.kernel = d.count("k");
                g.stride = d.count("s", g.kernel);
                if (g.kernel == 0 || g.stride == 0) d.error("pool k and s must be >= 1");
                if (!flattened) current = pool_output_shape(current, g);
                layer.kind = PoolLayer{g};
            } else if (d.kind() == "flatten") {
                layer.name = d.name(next_name("flatten"));
                flattened = true;
                flat = current.size();
                layer.kind = FlattenLayer{};
            } else if (d.kind() == "fc") {
                layer.name = d.name(next_name("fc"));
                FcLayer fc;
                fc.weights.in = flat;
                fc.weights.out = d.count("out");
                flat = fc.weights.out;
                layer.kind = fc;
            } else {
                d.error("unknown layer kind '" + d.kind() + "'");
            }
        } catch (const FormatError&) {
            throw;
        } catch (const Error& e) {
            d.error(e.what());
        }
        d.finish();
        net.layers.push_back(std::move(layer));
    }
    if (!have_input) throw FormatError("model spec has no 'input' line");
    net.validate();
    return net;
}

NetworkSpec load_model_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model spec " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_model_spec(text.str());
}

std::string format_model_spec(const NetworkSpec& net) {
    std::ostringstream out;
    out << "input " << net.input_shape.channels << ' ' << net.input_shape.height << ' '
        << net.input_shape.width << '\n';
    for (const LayerSpec& layer : net.layers) {
        if (const auto* conv = std::get_if<ConvLayer>(&layer.kind)) {
            const ConvGeometry& g = conv->geometry;
            out << "conv name=" << layer.name << " out=" << g.out_channels << " k=" << g.kernel
                << " s=" << g.stride << " p=" << g.padding;
        } else if (layer.is<ReluLayer>()) {
            out << "relu name=" << layer.name;
        } else if (const auto* pool = std::get_if<PoolLayer>(&layer.kind)) {
            out << "maxpool name=" << layer.name << " k=" << pool->geometry.kernel
                << " s=" << pool->geometry.stride;
        } else if (layer.is<FlattenLayer>()) {
            out << "flatten name=" << layer.name;
        } else if (const auto* fc = std::get_if<FcLayer>(&layer.kind)) {
            out << "fc name=" << layer.name << " out=" << fc->weights.out;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace deltacnn
