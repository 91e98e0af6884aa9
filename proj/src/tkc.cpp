#include "tsk/tkc.hpp"

#include "tsk/error.hpp"
#include "tsk/format.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace tsk {

namespace {

void check_inputs(const KernelMatrix &kddot, std::span<const ClassLabel> train_labels, const TkcConfig &cfg) {
    if (kddot.stage != MatrixStage::transductive) {
        throw ContractError("run_tkc: expected a transductive matrix, got " + std::string(to_string(kddot.stage)));
    }
    if (kddot.m == 0) {
        throw ContractError("run_tkc: no training samples");
    }
    if (train_labels.size() != kddot.m) {
        throw ContractError("run_tkc: " + std::to_string(train_labels.size()) + " labels for " +
                            std::to_string(kddot.m) + " training samples");
    }
    if (cfg.classes < 2) {
        throw ContractError("run_tkc: need at least two classes");
    }
}

std::vector<std::size_t> iota_from(std::size_t first, std::size_t count) {
    std::vector<std::size_t> v(count);
    std::iota(v.begin(), v.end(), first);
    return v;
}

ScoreTable empty_table(int classes) {
    ScoreTable t;
    t.ova.resize(0, classes);
    t.confidence.resize(0);
    return t;
}

}  // namespace

std::vector<std::size_t> rank_by_confidence(std::span<const double> scores) {
    std::vector<std::size_t> order = iota_from(0, scores.size());
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

ScoreTable run_single_round(const KernelMatrix &kddot, std::span<const ClassLabel> train_labels, const TkcConfig &cfg) {
    check_inputs(kddot, train_labels, cfg);
    if (kddot.n == 0) {
        return empty_table(cfg.classes);
    }
    const auto i_train = iota_from(0, kddot.m);
    const auto i_test = iota_from(kddot.m, kddot.n);
    const Eigen::MatrixXd k_train = slice(kddot, i_train, i_train);
    const Eigen::MatrixXd k_test = slice(kddot, i_test, i_train);
    return fit_predict(k_train, k_test, train_labels, cfg.classes, cfg.lambda);
}

TkcTrace run_tkc(const KernelMatrix &kddot, std::span<const ClassLabel> train_labels, const TkcConfig &cfg) {
    check_inputs(kddot, train_labels, cfg);
    TkcTrace trace;
    trace.promoted_per_class.assign(static_cast<std::size_t>(cfg.classes), 0);
    if (kddot.n == 0) {
        trace.round1 = empty_table(cfg.classes);
        trace.round2 = empty_table(cfg.classes);
        return trace;
    }

    std::vector<std::size_t> i_train = iota_from(0, kddot.m);
    const std::vector<std::size_t> i_test = iota_from(kddot.m, kddot.n);
    std::vector<ClassLabel> labels(train_labels.begin(), train_labels.end());

    for (int round = 1; round <= 2; ++round) {
        ScoreTable table;
        {
            const Eigen::MatrixXd k_train = slice(kddot, i_train, i_train);
            const Eigen::MatrixXd k_test = slice(kddot, i_test, i_train);
            table = fit_predict(k_train, k_test, labels, cfg.classes, cfg.lambda);
        }
        if (round == 2) {
            trace.round2 = std::move(table);
            break;
        }

        const std::span<const double> confidence(table.confidence.data(),
                                                 static_cast<std::size_t>(table.confidence.size()));
        trace.order = rank_by_confidence(confidence);
        const std::size_t keep = std::min(cfg.r, kddot.n);
        trace.promoted.assign(trace.order.begin(), trace.order.begin() + static_cast<std::ptrdiff_t>(keep));
        for (std::size_t pos : trace.promoted) {
            const ClassLabel pseudo = table.predicted[pos];
            trace.pseudo_labels.push_back(pseudo);
            ++trace.promoted_per_class[static_cast<std::size_t>(pseudo - 1)];
            labels.push_back(pseudo);
            i_train.push_back(i_test[pos]);
        }
        trace.round1 = std::move(table);
    }
    return trace;
}

void write_trace(std::ostream &out, const TkcTrace &trace) {
    out << "# promoted " << trace.promoted.size() << " of " << trace.round1.predicted.size() << '\n';
    out << "# promoted_per_class";
    for (std::size_t c = 0; c < trace.promoted_per_class.size(); ++c) {
        out << '\t' << (c + 1) << ':' << trace.promoted_per_class[c];
    }
    out << '\n';
    out << "index\tround1_label\tround1_score\tpromoted\tfinal_label\n";

    std::vector<bool> promoted(trace.round1.predicted.size(), false);
    for (std::size_t pos : trace.promoted) {
        promoted[pos] = true;
    }
    for (std::size_t i = 0; i < trace.round1.predicted.size(); ++i) {
        out << i << '\t' << trace.round1.predicted[i] << '\t' << format_double(trace.round1.confidence(static_cast<Eigen::Index>(i)))
            << '\t' << (promoted[i] ? 1 : 0) << '\t' << trace.round2.predicted[i] << '\n';
    }
}

}  // namespace tsk
