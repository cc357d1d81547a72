#include "deltacnn/metrics.hpp"

#include <string>

#include "deltacnn/errors.hpp"

namespace deltacnn {

FrameRecord& RunMetrics::begin_frame(std::size_t frame_idx) {
    if (!frames_.empty() && frames_.back().frame_idx >= frame_idx) {
        throw ConfigError("frame " + std::to_string(frame_idx) + " opened out of order");
    }
    FrameRecord& rec = frames_.emplace_back();
    rec.frame_idx = frame_idx;
    return rec;
}

FrameRecord& RunMetrics::frame(std::size_t frame_idx) {
    // Frames are nearly always appended and queried at the back.
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
        if (it->frame_idx == frame_idx) return *it;
    }
    throw ConfigError("metrics frame " + std::to_string(frame_idx) + " was never opened");
}

const LayerRecord& RunMetrics::record_layer(std::size_t frame_idx, std::string layer_name,
                                            std::size_t recomputed, std::size_t total,
                                            std::uint64_t macs_per_position) {
    if (recomputed > total) {
        throw ConfigError("layer " + layer_name + ": recomputed " + std::to_string(recomputed) +
                          " exceeds total " + std::to_string(total));
    }
    FrameRecord& rec = frame(frame_idx);
    LayerRecord& layer = rec.layers.emplace_back();
    layer.layer_name = std::move(layer_name);
    layer.recomputed_positions = recomputed;
    layer.total_positions = total;
    layer.actual_macs = recomputed * macs_per_position;
    layer.dense_macs = total * macs_per_position;
    layer.skipped_macs = layer.dense_macs - layer.actual_macs;
    if (layer.actual_macs + layer.skipped_macs != layer.dense_macs) {
        throw ConfigError("MAC conservation violated for layer " + layer.layer_name);
    }
    return layer;
}

MacTotals RunMetrics::totals_where(const std::function<bool(const LayerRecord&)>& keep) const {
    MacTotals t;
    for (const FrameRecord& f : frames_)
        for (const LayerRecord& l : f.layers) {
            if (!keep(l)) continue;
            t.actual += l.actual_macs;
            t.skipped += l.skipped_macs;
            t.dense += l.dense_macs;
        }
    return t;
}

MacTotals RunMetrics::totals() const {
    return totals_where([](const LayerRecord&) { return true; });
}

std::int64_t RunMetrics::total_wall_micros() const {
    std::int64_t sum = 0;
    for (const FrameRecord& f : frames_) sum += f.wall_micros;
    return sum;
}

std::size_t RunMetrics::head_activations() const {
    std::size_t n = 0;
    for (const FrameRecord& f : frames_) n += f.head_activated ? 1 : 0;
    return n;
}

double compute_savings(const MacTotals& totals) {
    if (totals.dense == 0) throw ConfigError("savings ratio undefined: no dense work recorded");
    return static_cast<double>(totals.actual) / static_cast<double>(totals.dense);
}

double compute_savings(const RunMetrics& metrics) { return compute_savings(metrics.totals()); }

std::optional<double> accuracy(const RunMetrics& metrics) {
    std::size_t labeled = 0;
    std::size_t correct = 0;
    for (const FrameRecord& f : metrics.frames()) {
        if (!f.label) continue;
        ++labeled;
        correct += f.correct() ? 1 : 0;
    }
    if (labeled == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(labeled);
}

}  // namespace deltacnn
