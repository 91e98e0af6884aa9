#include "tsk/error.hpp"
#include "tsk/tkc.hpp"

#include "oracle.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace tsk;

namespace {

struct Problem {
    KernelMatrix kddot;
    std::vector<ClassLabel> train_labels;
    std::vector<ClassLabel> test_labels;
};

Problem synthetic_problem(std::size_t per_class, std::uint32_t seed, const std::string &target = "kitchen") {
    synthetic::CorpusShape shape;
    shape.per_class = per_class;
    shape.seed = seed;
    const auto docs = synthetic::make_corpus(shape);
    std::vector<std::string> train;
    std::vector<std::string> test;
    Problem p;
    for (const auto &d : docs) {
        if (d.domain == target) {
            test.push_back(d.text);
            p.test_labels.push_back(*d.label);
        } else {
            train.push_back(d.text);
            p.train_labels.push_back(*d.label);
        }
    }
    p.kddot = compute_kernel_pipeline(train, test, { KernelFamily::presence, 3, 5, true });
    return p;
}

}  // namespace

TEST(RankByConfidence, Examples) {
    const std::vector<double> s{ 0.1, 0.9, 0.5 };
    EXPECT_EQ(rank_by_confidence(s), (std::vector<std::size_t>{ 1, 2, 0 }));
    const std::vector<double> tie{ 0.5, 0.5 };
    EXPECT_EQ(rank_by_confidence(tie), (std::vector<std::size_t>{ 0, 1 }));
    EXPECT_TRUE(rank_by_confidence({}).empty());
}

TEST(RunTkc, MatchesLiteralAlgorithmOnTinyCorpus) {
    // 3 labelled + 2 unlabelled documents; bigram/trigram intersection kernel.
    const std::vector<std::string> train{ "good good", "bad bad", "good day" };
    const std::vector<std::string> test{ "good", "bad day" };
    const std::vector<ClassLabel> labels{ 2, 1, 2 };
    const KernelConfig cfg{ KernelFamily::intersection, 2, 3, true };

    std::vector<std::u32string> z;
    for (const auto &t : train) z.push_back(preprocess(t, true));
    for (const auto &t : test) z.push_back(preprocess(t, true));
    const auto kddot_oracle = oracle::transductive(z, 2, 3, oracle::Family::intersection);

    for (std::size_t r : { 0u, 1u, 2u, 5u }) {
        for (double lambda : { 1e-5, 0.5 }) {
            const auto expected = oracle::run_algorithm(kddot_oracle, 3, { 2, 1, 2 }, 2, r, lambda);
            const auto kddot = compute_kernel_pipeline(train, test, cfg);
            const auto trace = run_tkc(kddot, labels, { r, lambda, 2 });

            for (std::size_t i = 0; i < 2; ++i) {
                for (int c = 0; c < 2; ++c) {
                    const double want = expected.round1_ova[i][static_cast<std::size_t>(c)];
                    EXPECT_NEAR(trace.round1.ova(static_cast<Eigen::Index>(i), c), want, 1e-7 * (1 + std::abs(want)));
                }
                EXPECT_EQ(trace.round1.predicted[i], expected.round1_labels[i]);
            }
            ASSERT_EQ(trace.promoted.size(), expected.keep.size());
            for (std::size_t k = 0; k < expected.keep.size(); ++k) {
                EXPECT_EQ(trace.promoted[k] + 1, expected.keep[k]);
            }
            EXPECT_EQ(trace.final_labels(), expected.final_labels);
        }
    }
}

TEST(RunTkc, HandSetMatrixTrace) {
    // Transductive kernel written out by hand. Two test points, one clearly
    // close to each training cluster; the first test point sits closer.
    KernelMatrix k;
    k.m = 3;
    k.n = 2;
    k.stage = MatrixStage::transductive;
    k.values.resize(5, 5);
    k.values << 4, 1, 1, 3, 1,
                1, 4, 1, 1, 2,
                1, 1, 4, 1, 2,
                3, 1, 1, 4, 1,
                1, 2, 2, 1, 4;
    const std::vector<ClassLabel> labels{ 1, 2, 2 };

    oracle::Matrix dense(5, std::vector<double>(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) dense[i][j] = k.values(i, j);
    const auto expected = oracle::run_algorithm(dense, 3, { 1, 2, 2 }, 2, 1, 0.1);
    const auto trace = run_tkc(k, labels, { 1, 0.1, 2 });

    EXPECT_EQ(trace.round1.predicted, expected.round1_labels);
    EXPECT_EQ(trace.round1.predicted, (std::vector<ClassLabel>{ 1, 2 }));
    ASSERT_EQ(trace.promoted.size(), 1u);
    EXPECT_EQ(trace.promoted[0] + 1, expected.keep[0]);
    EXPECT_EQ(trace.final_labels(), expected.final_labels);
}

TEST(RunTkc, ZeroPromotionEqualsSingleRound) {
    const auto p = synthetic_problem(6, 3);
    const auto trace = run_tkc(p.kddot, p.train_labels, { 0, 1e-5, 2 });
    const auto single = run_single_round(p.kddot, p.train_labels, { 0, 1e-5, 2 });
    EXPECT_TRUE(trace.promoted.empty());
    EXPECT_EQ(trace.final_labels(), trace.round1.predicted);
    EXPECT_EQ(trace.final_labels(), single.predicted);
    EXPECT_EQ(trace.round2.confidence, single.confidence);
}

TEST(RunTkc, PromotionInvariants) {
    const auto p = synthetic_problem(8, 5);
    const std::size_t n = p.kddot.n;
    for (std::size_t r : { std::size_t{ 3 }, n / 2, n, n + 10 }) {
        const auto trace = run_tkc(p.kddot, p.train_labels, { r, 1e-5, 2 });
        const std::size_t keep = std::min(r, n);
        ASSERT_EQ(trace.promoted.size(), keep);
        ASSERT_EQ(trace.final_labels().size(), n);

        std::vector<bool> in_keep(n, false);
        double min_in = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < keep; ++k) {
            const std::size_t pos = trace.promoted[k];
            EXPECT_FALSE(in_keep[pos]) << "duplicate promotion";
            in_keep[pos] = true;
            EXPECT_EQ(trace.pseudo_labels[k], trace.round1.predicted[pos]);
            min_in = std::min(min_in, trace.round1.confidence(static_cast<Eigen::Index>(pos)));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_keep[i]) {
                EXPECT_LE(trace.round1.confidence(static_cast<Eigen::Index>(i)), min_in);
            }
        }
        std::size_t per_class_total = 0;
        for (auto c : trace.promoted_per_class) per_class_total += c;
        EXPECT_EQ(per_class_total, keep);
    }
}

TEST(RunTkc, IsDeterministic) {
    const auto p = synthetic_problem(6, 8);
    const auto a = run_tkc(p.kddot, p.train_labels, { 10, 1e-5, 2 });
    const auto b = run_tkc(p.kddot, p.train_labels, { 10, 1e-5, 2 });
    EXPECT_EQ(a.round1.ova, b.round1.ova);
    EXPECT_EQ(a.round2.ova, b.round2.ova);
    EXPECT_EQ(a.promoted, b.promoted);
}

TEST(RunTkc, ClassifiesSyntheticReviewsAboveChance) {
    const auto p = synthetic_problem(15, 21);
    const auto trace = run_tkc(p.kddot, p.train_labels, { 15, 1e-5, 2 });
    std::size_t correct = 0;
    for (std::size_t i = 0; i < p.test_labels.size(); ++i) {
        correct += trace.final_labels()[i] == p.test_labels[i];
    }
    EXPECT_GT(static_cast<double>(correct) / p.test_labels.size(), 0.75);
}

TEST(RunTkc, EdgeCases) {
    const auto p = synthetic_problem(3, 2);
    KernelMatrix no_test = p.kddot;
    no_test.values = p.kddot.values.topLeftCorner(p.kddot.m, p.kddot.m);
    no_test.n = 0;
    const auto trace = run_tkc(no_test, p.train_labels, {});
    EXPECT_TRUE(trace.final_labels().empty());

    KernelMatrix raw = p.kddot;
    raw.stage = MatrixStage::raw;
    EXPECT_THROW(run_tkc(raw, p.train_labels, {}), ContractError);

    const std::vector<ClassLabel> short_labels{ 1 };
    EXPECT_THROW(run_tkc(p.kddot, short_labels, {}), ContractError);

    KernelMatrix no_train;
    no_train.stage = MatrixStage::transductive;
    no_train.n = 1;
    no_train.values = Eigen::MatrixXd::Ones(1, 1);
    EXPECT_THROW(run_tkc(no_train, {}, {}), ContractError);
}

TEST(WriteTrace, OneLinePerTestSample) {
    const auto p = synthetic_problem(3, 4);
    const auto trace = run_tkc(p.kddot, p.train_labels, { 2, 1e-5, 2 });
    std::ostringstream out;
    write_trace(out, trace);
    std::istringstream in(out.str());
    std::string line;
    std::size_t data_lines = 0;
    std::size_t promoted = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) {
            continue;
        }
        if (!header) {
            EXPECT_EQ(line, "index\tround1_label\tround1_score\tpromoted\tfinal_label");
            header = true;
            continue;
        }
        std::istringstream fields(line);
        std::size_t index;
        int r1;
        double score;
        int flag;
        int final_label;
        ASSERT_TRUE(fields >> index >> r1 >> score >> flag >> final_label);
        EXPECT_EQ(index, data_lines);
        EXPECT_EQ(score, trace.round1.confidence(static_cast<Eigen::Index>(index)));  // round-trips exactly
        promoted += flag;
        ++data_lines;
    }
    EXPECT_EQ(data_lines, p.kddot.n);
    EXPECT_EQ(promoted, 2u);
}
