#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace deltacnn {

struct LayerRecord {
    std::string layer_name;
    std::size_t recomputed_positions = 0;
    std::size_t total_positions = 0;
    std::uint64_t actual_macs = 0;
    std::uint64_t skipped_macs = 0;
    std::uint64_t dense_macs = 0;
};

struct FrameRecord {
    std::size_t frame_idx = 0;
    std::vector<LayerRecord> layers;
    std::int64_t wall_micros = 0;
    std::size_t prediction = 0;
    std::optional<std::uint32_t> label;
    bool head_activated = false;

    bool correct() const { return label && *label == prediction; }
};

struct MacTotals {
    std::uint64_t actual = 0;
    std::uint64_t skipped = 0;
    std::uint64_t dense = 0;
};

// Per-frame, per-layer compute counters for one run. Aggregates are always
// derived from the records so they cannot drift from them.
class RunMetrics {
public:
    // Opens a record for frame_idx; frames must be opened in increasing order.
    FrameRecord& begin_frame(std::size_t frame_idx);

    // Appends a layer record to an open frame: actual = recomputed * per_position,
    // dense = total * per_position. Throws ConfigError if the frame was never
    // opened or recomputed > total.
    const LayerRecord& record_layer(std::size_t frame_idx, std::string layer_name,
                                    std::size_t recomputed, std::size_t total,
                                    std::uint64_t macs_per_position);

    FrameRecord& frame(std::size_t frame_idx);
    const std::vector<FrameRecord>& frames() const { return frames_; }
    bool empty() const { return frames_.empty(); }

    MacTotals totals() const;
    MacTotals totals_where(const std::function<bool(const LayerRecord&)>& keep) const;
    std::uint64_t total_actual_macs() const { return totals().actual; }
    std::uint64_t total_dense_macs() const { return totals().dense; }
    std::int64_t total_wall_micros() const;
    std::size_t head_activations() const;

private:
    std::vector<FrameRecord> frames_;
};

// total_actual_macs / total_dense_macs. Throws ConfigError on a run without
// any dense work (avoids 0/0).
double compute_savings(const RunMetrics& metrics);
double compute_savings(const MacTotals& totals);

// Correct predictions over labeled frames; nullopt when nothing is labeled.
std::optional<double> accuracy(const RunMetrics& metrics);

}  // namespace deltacnn
