#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

namespace gsyn::frontend {

// Counts writes per cell over all control paths of a gated program. Each
// cell carries the minimum and maximum number of writes over the paths seen so
// far; gates merge their branches by taking min/max per cell. This is exact
// for "exactly once on every root-to-leaf gate path" because branch choices at
// different gates are treated as independent.
class WriteTracker {
public:
    struct Count {
        int min = 0;
        int max = 0;
        int writer = -1;
    };

    // A cell written on some branches of a gate but not on others.
    struct PartialWrite {
        int cell = -1;
        std::vector<int> writing_branches;
        std::vector<int> missing_branches;
        int writer = -1;
    };

    explicit WriteTracker(std::size_t cells) : state_(cells) {}

    const Count& at(int cell) const { return state_[static_cast<std::size_t>(cell)]; }
    bool definitely_written(int cell) const { return at(cell).min >= 1; }

    // Records a write; returns the previous writer if the cell may already have
    // been written on the current path.
    std::optional<int> write(int cell, int writer) {
        auto& c = state_[static_cast<std::size_t>(cell)];
        std::optional<int> prev;
        if (c.max >= 1) prev = c.writer;
        c.min += 1;
        c.max += 1;
        c.writer = writer;
        return prev;
    }

    void begin_gate() { frames_.push_back(Frame{state_, {}}); }

    void begin_branch() { state_ = frames_.back().snapshot; }

    void end_branch() { frames_.back().branches.push_back(state_); }

    std::vector<PartialWrite> end_gate() {
        Frame frame = std::move(frames_.back());
        frames_.pop_back();
        std::vector<PartialWrite> partial;
        if (frame.branches.empty()) {
            state_ = std::move(frame.snapshot);
            return partial;
        }
        state_ = frame.branches[0];
        for (std::size_t cell = 0; cell < state_.size(); ++cell) {
            Count merged = frame.branches[0][cell];
            for (std::size_t b = 1; b < frame.branches.size(); ++b) {
                const Count& c = frame.branches[b][cell];
                merged.min = std::min(merged.min, c.min);
                if (c.max > merged.max) {
                    merged.max = c.max;
                    merged.writer = c.writer;
                }
            }
            const int before = frame.snapshot[cell].max;
            if (merged.min != merged.max && merged.max > before) {
                PartialWrite pw;
                pw.cell = static_cast<int>(cell);
                pw.writer = merged.writer;
                for (std::size_t b = 0; b < frame.branches.size(); ++b) {
                    if (frame.branches[b][cell].max > before)
                        pw.writing_branches.push_back(static_cast<int>(b));
                    else
                        pw.missing_branches.push_back(static_cast<int>(b));
                }
                // Reported once; treat as written from here on to avoid cascades.
                merged.min = merged.max;
                partial.push_back(std::move(pw));
            }
            state_[cell] = merged;
        }
        return partial;
    }

private:
    struct Frame {
        std::vector<Count> snapshot;
        std::vector<std::vector<Count>> branches;
    };

    std::vector<Count> state_;
    std::vector<Frame> frames_;
};

}  // namespace gsyn::frontend
