#include "tsk/error.hpp"
#include "tsk/kernel_matrix.hpp"
#include "tsk/unicode.hpp"

#include "oracle.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

using namespace tsk;
namespace fs = std::filesystem;

namespace {

KernelMatrix matrix_of(std::initializer_list<std::initializer_list<double>> rows, std::size_t m, std::size_t n,
                       MatrixStage stage) {
    KernelMatrix k;
    k.m = m;
    k.n = n;
    k.stage = stage;
    k.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    Eigen::Index i = 0;
    for (const auto &row : rows) {
        Eigen::Index j = 0;
        for (double v : row) {
            k.values(i, j++) = v;
        }
        ++i;
    }
    return k;
}

std::vector<std::string> review_texts(std::size_t count, std::uint32_t seed) {
    synthetic::CorpusShape shape;
    shape.per_class = (count + 7) / 8;
    shape.seed = seed;
    std::vector<std::string> texts;
    for (const auto &d : synthetic::make_corpus(shape)) {
        if (texts.size() < count) {
            texts.push_back(d.text);
        }
    }
    return texts;
}

fs::path temp_file(const std::string &name) { return fs::temp_directory_path() / ("tsk_test_" + name); }

}  // namespace

TEST(BuildFullMatrix, TwoDocumentExample) {
    const std::vector<std::string> train{ "abab" };
    const std::vector<std::string> test{ "baba" };
    const auto k = build_full_matrix(train, test, { KernelFamily::intersection, 2, 2, true });
    EXPECT_EQ(k.m, 1u);
    EXPECT_EQ(k.n, 1u);
    EXPECT_EQ(k.stage, MatrixStage::raw);
    EXPECT_EQ(k.values(0, 0), 3.0);
    EXPECT_EQ(k.values(0, 1), 2.0);
    EXPECT_EQ(k.values(1, 0), 2.0);
    EXPECT_EQ(k.values(1, 1), 3.0);
}

TEST(BuildFullMatrix, MatchesBruteForceAndDiagonalIsSelfSimilarity) {
    std::mt19937 rng(8);
    std::vector<std::string> texts;
    for (int i = 0; i < 12; ++i) {
        std::string s(rng() % 30, 'a');
        for (auto &c : s) c = static_cast<char>('a' + rng() % 3);
        texts.push_back(s);
    }
    const std::vector<std::string> train(texts.begin(), texts.begin() + 7);
    const std::vector<std::string> test(texts.begin() + 7, texts.end());
    const auto k = build_full_matrix(train, test, { KernelFamily::intersection, 1, 3, true }, 3);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto zi = decode_utf8(texts[i]).text;
        for (std::size_t j = 0; j < texts.size(); ++j) {
            const auto zj = decode_utf8(texts[j]).text;
            ASSERT_EQ(k.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                      oracle::blended(zi, zj, 1, 3, oracle::Family::intersection));
        }
    }
}

TEST(BuildFullMatrix, EmptyTestSetIsTrainGram) {
    const std::vector<std::string> train{ "the cat sat", "the dog sat", "a bird flew" };
    const std::vector<std::string> test{ "the cat flew" };
    const KernelConfig cfg{ KernelFamily::presence, 2, 4, true };
    const auto with_test = build_full_matrix(train, test, cfg);
    const auto train_only = build_full_matrix(train, {}, cfg);
    EXPECT_EQ(train_only.n, 0u);
    EXPECT_EQ(train_only.values, with_test.values.topLeftCorner(3, 3));
}

TEST(BuildFullMatrix, EmptyTrainSetIsRejected) {
    EXPECT_THROW(build_full_matrix({}, std::vector<std::string>{ "x" }, {}), ContractError);
}

TEST(Normalize, Examples) {
    const auto k = normalize(matrix_of({ { 4, 2 }, { 2, 1 } }, 1, 1, MatrixStage::raw));
    EXPECT_EQ(k.stage, MatrixStage::normalized);
    EXPECT_EQ(k.values, Eigen::Matrix2d::Ones().eval());
}

TEST(Normalize, DegenerateRowBecomesUnitRow) {
    const auto k = normalize(matrix_of({ { 4, 0, 2 }, { 0, 0, 0 }, { 2, 0, 9 } }, 2, 1, MatrixStage::raw));
    EXPECT_EQ(k.values(1, 1), 1.0);
    EXPECT_EQ(k.values(0, 1), 0.0);
    EXPECT_EQ(k.values(1, 2), 0.0);
    EXPECT_EQ(k.values(2, 1), 0.0);
    EXPECT_DOUBLE_EQ(k.values(0, 2), 2.0 / 6.0);
    EXPECT_EQ(k.values(0, 0), 1.0);
}

TEST(Normalize, IsIdempotent) {
    const auto texts = review_texts(20, 3);
    const std::vector<std::string> train(texts.begin(), texts.begin() + 12);
    const std::vector<std::string> test(texts.begin() + 12, texts.end());
    const auto once = normalize(build_full_matrix(train, test, {}));
    const auto twice = normalize(once);
    EXPECT_EQ(once.values, twice.values);
}

TEST(RbfTransform, ValuesAndStageCheck) {
    const auto k = rbf_transform(matrix_of({ { 1, 0 }, { 0, 1 } }, 1, 1, MatrixStage::normalized));
    EXPECT_EQ(k.values(0, 0), 1.0);
    EXPECT_NEAR(k.values(0, 1), 0.36787944117144233, 1e-16);
    EXPECT_THROW(rbf_transform(matrix_of({ { 1 } }, 1, 0, MatrixStage::raw)), ContractError);
}

TEST(RbfTransform, IsMonotone) {
    const auto k = rbf_transform(matrix_of({ { 1, 0.2, 0.7 }, { 0.2, 1, 0.4 }, { 0.7, 0.4, 1 } }, 3, 0,
                                           MatrixStage::normalized));
    EXPECT_LT(k.values(0, 1), k.values(1, 2));
    EXPECT_LT(k.values(1, 2), k.values(0, 2));
    EXPECT_LT(k.values(0, 2), k.values(0, 0));
}

TEST(TransductiveProduct, SmallExamples) {
    const auto id = transductive_product(matrix_of({ { 1, 0 }, { 0, 1 } }, 1, 1, MatrixStage::rbf));
    EXPECT_EQ(id.values, Eigen::Matrix2d::Identity().eval());
    EXPECT_EQ(id.stage, MatrixStage::transductive);

    const auto k = transductive_product(matrix_of({ { 1, 0.5 }, { 0.5, 1 } }, 1, 1, MatrixStage::rbf));
    EXPECT_EQ(k.values(0, 0), 1.25);
    EXPECT_EQ(k.values(0, 1), 1.0);
    EXPECT_EQ(k.values(1, 0), 1.0);
    EXPECT_EQ(k.values(1, 1), 1.25);
}

TEST(TransductiveProduct, RowsAreFeatureDotProducts) {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(std::exp(-1.0), 1.0);
    KernelMatrix k;
    k.m = 50;
    k.n = 23;
    k.stage = MatrixStage::rbf;
    k.values.resize(73, 73);
    for (Eigen::Index i = 0; i < 73; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            k.values(i, j) = k.values(j, i) = u(rng);
        }
    }
    const auto single = transductive_product(k, 1);
    const auto multi = transductive_product(k, 4);
    EXPECT_EQ(single.values, multi.values);
    for (Eigen::Index i = 0; i < 73; ++i) {
        for (Eigen::Index j = 0; j < 73; ++j) {
            EXPECT_NEAR(single.values(i, j), k.values.row(i).dot(k.values.row(j)), 1e-12 * single.values(i, j));
            ASSERT_EQ(single.values(i, j), single.values(j, i));
        }
    }
}

TEST(Pipeline, MatchesNestedVectorOracle) {
    const auto texts = review_texts(14, 21);
    const std::vector<std::string> train(texts.begin(), texts.begin() + 9);
    const std::vector<std::string> test(texts.begin() + 9, texts.end());
    const KernelConfig cfg{ KernelFamily::intersection, 3, 5, true };
    const auto k = compute_kernel_pipeline(train, test, cfg);

    std::vector<std::u32string> z;
    for (const auto &t : texts) {
        z.push_back(preprocess(t, true));
    }
    const auto expected = oracle::transductive(z, 3, 5, oracle::Family::intersection);
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = 0; j < z.size(); ++j) {
            EXPECT_NEAR(k.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), expected[i][j],
                        1e-12 * expected[i][j]);
        }
    }
}

TEST(Pipeline, StageInvariantsAndPsd) {
    const auto texts = review_texts(60, 5);
    const std::vector<std::string> train(texts.begin(), texts.begin() + 40);
    const std::vector<std::string> test(texts.begin() + 40, texts.end());
    const KernelConfig cfg{ KernelFamily::presence, 5, 8, true };

    const auto khat = compute_kernel_pipeline(train, test, cfg, MatrixStage::normalized);
    EXPECT_NEAR((khat.values.diagonal().array() - 1.0).abs().maxCoeff(), 0.0, 1e-12);
    EXPECT_GE(khat.values.minCoeff(), 0.0);
    EXPECT_LE(khat.values.maxCoeff(), 1.0);

    const auto ktilde = rbf_transform(khat);
    EXPECT_GE(ktilde.values.minCoeff(), std::exp(-1.0));
    EXPECT_LE(ktilde.values.maxCoeff(), 1.0);

    const auto kddot = transductive_product(ktilde);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kddot.values, Eigen::EigenvaluesOnly);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8 * kddot.values.trace());
}

TEST(Pipeline, TrainingBlockDependsOnTheTestSet) {
    const auto texts = review_texts(24, 9);
    const std::vector<std::string> train(texts.begin(), texts.begin() + 12);
    const std::vector<std::string> test_a(texts.begin() + 12, texts.begin() + 18);
    const std::vector<std::string> test_b(texts.begin() + 18, texts.end());
    const auto ka = compute_kernel_pipeline(train, test_a, {});
    const auto kb = compute_kernel_pipeline(train, test_b, {});
    EXPECT_NE(ka.values.topLeftCorner(12, 12), kb.values.topLeftCorner(12, 12));
}

TEST(Pipeline, IdenticalAcrossThreadCounts) {
    const auto texts = review_texts(90, 13);
    const std::vector<std::string> train(texts.begin(), texts.begin() + 60);
    const std::vector<std::string> test(texts.begin() + 60, texts.end());
    const auto one = compute_kernel_pipeline(train, test, {}, MatrixStage::transductive, 1);
    const auto many = compute_kernel_pipeline(train, test, {}, MatrixStage::transductive, 5);
    EXPECT_EQ(one.values, many.values);
}

TEST(Slice, SelectsBlocksInOrder) {
    const auto k = matrix_of({ { 1, 2, 3 }, { 4, 5, 6 }, { 7, 8, 9 } }, 2, 1, MatrixStage::transductive);
    const std::vector<std::size_t> train{ 0, 1 };
    const std::vector<std::size_t> test{ 2 };
    EXPECT_EQ(slice(k, train, train), k.values.topLeftCorner(2, 2));
    Eigen::MatrixXd expected(1, 2);
    expected << 7, 8;
    EXPECT_EQ(slice(k, test, train), expected);

    const std::vector<std::size_t> dup{ 2, 0, 2 };
    const auto d = slice(k, dup, dup);
    EXPECT_EQ(d(0, 0), 9);
    EXPECT_EQ(d(0, 1), 7);
    EXPECT_EQ(d(2, 2), 9);
    EXPECT_EQ(d(1, 2), 3);

    const std::vector<std::size_t> bad{ 3 };
    EXPECT_THROW(slice(k, bad, train), ContractError);
}

TEST(MatrixCache, RoundTripIsBitExact) {
    std::mt19937_64 rng(1);
    KernelMatrix k;
    k.m = 5;
    k.n = 3;
    k.stage = MatrixStage::rbf;
    k.values.resize(8, 8);
    for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 8; ++j) {
            k.values(i, j) = std::bit_cast<double>(rng() & 0x7FEFFFFFFFFFFFFFull);  // any finite bit pattern
        }
    }
    const auto path = temp_file("roundtrip.tskm");
    save_matrix(k, path);
    EXPECT_EQ(fs::file_size(path), 22u + 64u * 8u);
    const auto back = load_matrix(path);
    EXPECT_EQ(back.m, 5u);
    EXPECT_EQ(back.n, 3u);
    EXPECT_EQ(back.stage, MatrixStage::rbf);
    for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 8; ++j) {
            ASSERT_EQ(std::bit_cast<std::uint64_t>(back.values(i, j)), std::bit_cast<std::uint64_t>(k.values(i, j)));
        }
    }
    fs::remove(path);
}

TEST(MatrixCache, LayoutIsRowMajorLittleEndian) {
    const auto k = matrix_of({ { 1, 2 }, { 3, 4 } }, 1, 1, MatrixStage::transductive);
    const auto path = temp_file("layout.tskm");
    save_matrix(k, path);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    ASSERT_EQ(bytes.size(), 22u + 32u);
    EXPECT_EQ(bytes.substr(0, 4), "TSKM");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[5], 1);   // m low byte
    EXPECT_EQ(bytes[13], 1);  // n low byte
    EXPECT_EQ(bytes[21], 3);  // stage
    double second = 0;
    std::memcpy(&second, bytes.data() + 22 + 8, 8);  // host is little-endian
    EXPECT_EQ(second, 2.0);
    fs::remove(path);
}

TEST(MatrixCache, RejectsWrongMagic) {
    const auto path = temp_file("magic.tskm");
    std::ofstream(path, std::ios::binary) << "XXXX\x01";
    try {
        load_matrix(path);
        FAIL() << "expected DataError";
    } catch (const DataError &e) {
        EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
    }
    fs::remove(path);
}

TEST(MatrixCache, RejectsTruncatedPayloadWithOffset) {
    const auto k = matrix_of({ { 1, 2 }, { 3, 4 } }, 1, 1, MatrixStage::raw);
    const auto path = temp_file("trunc.tskm");
    save_matrix(k, path);
    fs::resize_file(path, 22 + 20);
    try {
        load_matrix(path);
        FAIL() << "expected DataError";
    } catch (const DataError &e) {
        EXPECT_NE(std::string(e.what()).find("offset 42"), std::string::npos) << e.what();
    }
    fs::resize_file(path, 10);
    EXPECT_THROW(load_matrix(path), DataError);
    fs::remove(path);
}
