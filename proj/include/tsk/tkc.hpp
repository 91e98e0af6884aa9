#pragma once

#include "tsk/classifier.hpp"
#include "tsk/kernel_matrix.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tsk {

struct TkcConfig {
    std::size_t r = 1000;  // test samples promoted into round 2; clamped to n
    double lambda = 1e-5;
    int classes = 2;
};

/// Everything the two-round classifier decided, for audit.
struct TkcTrace {
    ScoreTable round1;
    std::vector<std::size_t> order;         // test positions by descending round-1 confidence
    std::vector<std::size_t> promoted;      // first min(r, n) entries of order
    std::vector<ClassLabel> pseudo_labels;  // round-1 labels at the promoted positions
    std::vector<std::size_t> promoted_per_class;  // index c-1 counts pseudo-label c
    ScoreTable round2;

    [[nodiscard]] const std::vector<ClassLabel> &final_labels() const noexcept { return round2.predicted; }
};

// Test positions ordered by score, highest first; ties keep ascending position.
std::vector<std::size_t> rank_by_confidence(std::span<const double> scores);

// Two rounds of one-versus-all kernel ridge regression on a transductive
// matrix. Round 1 trains on the m labelled rows; the top-r test samples by
// round-1 confidence join the training block with their predicted labels,
// and round 2 re-scores every test sample. Test labels are never consulted.
TkcTrace run_tkc(const KernelMatrix &kddot, std::span<const ClassLabel> train_labels, const TkcConfig &cfg);

// Round 1 only: the inductive baseline on the same matrix.
ScoreTable run_single_round(const KernelMatrix &kddot, std::span<const ClassLabel> train_labels, const TkcConfig &cfg);

// One line per test sample: index, round-1 label, round-1 score, promoted
// flag, final label. Leading '#' lines summarise promotion skew.
void write_trace(std::ostream &out, const TkcTrace &trace);

}  // namespace tsk
