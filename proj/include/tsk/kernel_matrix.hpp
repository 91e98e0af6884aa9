#pragma once

#include "tsk/ngram.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace tsk {

// Which transform has been applied to a kernel matrix. The numeric codes
// are part of the cache file format.
enum class MatrixStage : std::uint8_t {
    raw = 0,           // K_ij = k(z_i, z_j)
    normalized = 1,    // K_ij / sqrt(K_ii K_jj)
    rbf = 2,           // exp(-1 + normalized)
    transductive = 3,  // rbf * rbf^T
};

std::string_view to_string(MatrixStage stage);
MatrixStage parse_matrix_stage(std::string_view name);

/// Dense symmetric kernel matrix over Z = train followed by test.
/// Rows/columns [0, m) are training samples, [m, m + n) test samples.
struct KernelMatrix {
    Eigen::MatrixXd values;
    std::size_t m = 0;
    std::size_t n = 0;
    MatrixStage stage = MatrixStage::raw;

    [[nodiscard]] std::size_t dim() const noexcept { return m + n; }
};

// Raw blended kernel over every pair of train+test texts. Only the upper
// triangle is evaluated; the lower one is an exact mirror. Throws
// ContractError for an empty training set.
KernelMatrix build_full_matrix(std::span<const std::string> train,
                               std::span<const std::string> test,
                               const KernelConfig &cfg,
                               unsigned threads = 1);

// Rows whose diagonal is 0 (text shorter than every n-gram order) become a
// unit row: 1 on the diagonal, 0 elsewhere. Accepts raw or normalized input.
KernelMatrix normalize(KernelMatrix k);

// Elementwise exp(-1 + x). Requires a normalized matrix.
KernelMatrix rbf_transform(KernelMatrix k);

// K * K^T on an rbf-stage matrix. Rows are produced in fixed blocks so the
// result does not depend on the thread count; the result is mirrored from
// its upper triangle so it is exactly symmetric.
KernelMatrix transductive_product(const KernelMatrix &k, unsigned threads = 1);

// build -> normalize -> rbf -> product, stopping after `last`.
KernelMatrix compute_kernel_pipeline(std::span<const std::string> train,
                                     std::span<const std::string> test,
                                     const KernelConfig &cfg,
                                     MatrixStage last = MatrixStage::transductive,
                                     unsigned threads = 1);

// Order-preserving row/column selection; duplicates are kept. Throws
// ContractError for an out-of-range index.
Eigen::MatrixXd slice(const KernelMatrix &k, std::span<const std::size_t> rows, std::span<const std::size_t> cols);

// Cache file: "TSKM", version 0x01, m (u64 LE), n (u64 LE), stage (u8),
// then (m+n)^2 binary64 LE values in row-major order.
void save_matrix(const KernelMatrix &k, const std::filesystem::path &path);

// Throws DataError on bad magic/version/stage or a truncated payload; the
// message carries the byte offset where reading failed.
KernelMatrix load_matrix(const std::filesystem::path &path);

}  // namespace tsk
