#include "tsk/kernel_matrix.hpp"

#include "tsk/error.hpp"
#include "tsk/parallel.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <vector>

namespace tsk {

namespace {

constexpr std::array<char, 4> magic{ 'T', 'S', 'K', 'M' };
constexpr std::uint8_t format_version = 0x01;
constexpr std::size_t header_size = 4 + 1 + 8 + 8 + 1;

// Rows per work item for the O(N^2) and O(N^3) loops. Fixed so results are
// identical for every thread count.
constexpr std::size_t row_block = 32;

void put_u64(char *out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        out[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
    }
}

std::uint64_t get_u64(const char *in) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
        v |= std::uint64_t{ static_cast<unsigned char>(in[b]) } << (8 * b);
    }
    return v;
}

void require_stage(const KernelMatrix &k, MatrixStage expected, const char *op) {
    if (k.stage != expected) {
        throw ContractError(std::string(op) + ": expected a " + std::string(to_string(expected)) +
                            " matrix, got " + std::string(to_string(k.stage)));
    }
}

void require_square(const KernelMatrix &k) {
    const auto d = static_cast<Eigen::Index>(k.dim());
    if (k.values.rows() != d || k.values.cols() != d) {
        throw ContractError("kernel matrix shape does not match m + n");
    }
}

}  // namespace

std::string_view to_string(MatrixStage stage) {
    switch (stage) {
        case MatrixStage::raw:
            return "raw";
        case MatrixStage::normalized:
            return "normalized";
        case MatrixStage::rbf:
            return "rbf";
        case MatrixStage::transductive:
            return "transductive";
    }
    return "unknown";
}

MatrixStage parse_matrix_stage(std::string_view name) {
    for (auto s : { MatrixStage::raw, MatrixStage::normalized, MatrixStage::rbf, MatrixStage::transductive }) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw ContractError("unknown matrix stage: " + std::string(name));
}

KernelMatrix build_full_matrix(std::span<const std::string> train,
                               std::span<const std::string> test,
                               const KernelConfig &cfg,
                               unsigned threads) {
    if (train.empty()) {
        throw ContractError("build_full_matrix: training set is empty");
    }
    std::vector<std::string> all;
    all.reserve(train.size() + test.size());
    all.insert(all.end(), train.begin(), train.end());
    all.insert(all.end(), test.begin(), test.end());

    const FeatureTable features = FeatureTable::build(all, cfg, threads);
    const std::size_t d = all.size();
    all.clear();

    KernelMatrix k;
    k.m = train.size();
    k.n = test.size();
    k.stage = MatrixStage::raw;
    k.values.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

    // Column-major storage: fill column j from rows i <= j, mirror into row j.
    // Each work item owns a disjoint set of columns (and their mirrors).
    parallel_chunks(d, row_block, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const auto row_j = features.row(j);
            for (std::size_t i = 0; i <= j; ++i) {
                const double v = sparse_kernel(features.row(i), row_j, cfg.family);
                k.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            }
        }
    });
    for (Eigen::Index j = 0; j < k.values.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < k.values.rows(); ++i) {
            k.values(i, j) = k.values(j, i);
        }
    }
    return k;
}

KernelMatrix normalize(KernelMatrix k) {
    require_square(k);
    if (k.stage != MatrixStage::raw && k.stage != MatrixStage::normalized) {
        throw ContractError("normalize: expected a raw or normalized matrix, got " + std::string(to_string(k.stage)));
    }
    const Eigen::Index d = k.values.rows();
    Eigen::VectorXd diag(d);
    std::vector<bool> degenerate(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        const double value = k.values(i, i);
        degenerate[static_cast<std::size_t>(i)] = !(value > 0.0);
        diag(i) = value > 0.0 ? value : 1.0;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        const bool dj = degenerate[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < d; ++i) {
            double &v = k.values(i, j);
            if (i == j) {
                v = 1.0;
            } else if (dj || degenerate[static_cast<std::size_t>(i)]) {
                v = 0.0;
            } else {
                // sqrt of the product, as in the definition; clamp rounding past 1
                v = std::min(1.0, v / std::sqrt(diag(i) * diag(j)));
            }
        }
    }
    k.stage = MatrixStage::normalized;
    return k;
}

KernelMatrix rbf_transform(KernelMatrix k) {
    require_square(k);
    require_stage(k, MatrixStage::normalized, "rbf_transform");
    k.values = k.values.unaryExpr([](double x) { return std::exp(x - 1.0); });
    k.stage = MatrixStage::rbf;
    return k;
}

KernelMatrix transductive_product(const KernelMatrix &k, unsigned threads) {
    require_square(k);
    require_stage(k, MatrixStage::rbf, "transductive_product");
    const Eigen::Index d = k.values.rows();

    KernelMatrix out;
    out.m = k.m;
    out.n = k.n;
    out.stage = MatrixStage::transductive;
    out.values.resize(d, d);

    const Eigen::MatrixXd transposed = k.values.transpose();
    parallel_chunks(static_cast<std::size_t>(d), row_block, threads, [&](std::size_t begin, std::size_t end) {
        const auto b = static_cast<Eigen::Index>(begin);
        const auto len = static_cast<Eigen::Index>(end - begin);
        out.values.middleRows(b, len).noalias() = k.values.middleRows(b, len) * transposed;
    });
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = j + 1; i < d; ++i) {
            out.values(i, j) = out.values(j, i);
        }
    }
    return out;
}

KernelMatrix compute_kernel_pipeline(std::span<const std::string> train,
                                     std::span<const std::string> test,
                                     const KernelConfig &cfg,
                                     MatrixStage last,
                                     unsigned threads) {
    KernelMatrix k = build_full_matrix(train, test, cfg, threads);
    if (last == MatrixStage::raw) {
        return k;
    }
    k = normalize(std::move(k));
    if (last == MatrixStage::normalized) {
        return k;
    }
    k = rbf_transform(std::move(k));
    if (last == MatrixStage::rbf) {
        return k;
    }
    return transductive_product(k, threads);
}

Eigen::MatrixXd slice(const KernelMatrix &k, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    const std::size_t d = k.dim();
    for (std::size_t idx : rows) {
        if (idx >= d) {
            throw ContractError("slice: row index " + std::to_string(idx) + " out of range for dimension " +
                                std::to_string(d));
        }
    }
    for (std::size_t idx : cols) {
        if (idx >= d) {
            throw ContractError("slice: column index " + std::to_string(idx) + " out of range for dimension " +
                                std::to_string(d));
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                k.values(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
        }
    }
    return out;
}

void save_matrix(const KernelMatrix &k, const std::filesystem::path &path) {
    require_square(k);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    std::array<char, header_size> header{};
    std::copy(magic.begin(), magic.end(), header.begin());
    header[4] = static_cast<char>(format_version);
    put_u64(header.data() + 5, k.m);
    put_u64(header.data() + 13, k.n);
    header[21] = static_cast<char>(static_cast<std::uint8_t>(k.stage));
    out.write(header.data(), header.size());

    const Eigen::Index d = k.values.rows();
    std::vector<char> buffer(static_cast<std::size_t>(d) * 8);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            put_u64(buffer.data() + 8 * j, std::bit_cast<std::uint64_t>(k.values(i, j)));
        }
        out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    }
    out.flush();
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

KernelMatrix load_matrix(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    const std::string name = path.string();

    std::array<char, header_size> header{};
    in.read(header.data(), header.size());
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got < 4 || !std::equal(magic.begin(), magic.end(), header.begin())) {
        throw DataError(name + ": bad magic at byte offset 0 (not a kernel matrix cache)");
    }
    if (got < header_size) {
        throw DataError(name + ": truncated header at byte offset " + std::to_string(got));
    }
    if (static_cast<std::uint8_t>(header[4]) != format_version) {
        throw DataError(name + ": unsupported format version " +
                        std::to_string(static_cast<unsigned>(static_cast<std::uint8_t>(header[4]))) +
                        " at byte offset 4");
    }
    KernelMatrix k;
    k.m = get_u64(header.data() + 5);
    k.n = get_u64(header.data() + 13);
    const auto stage = static_cast<std::uint8_t>(header[21]);
    if (stage > 3) {
        throw DataError(name + ": invalid stage code " + std::to_string(stage) + " at byte offset 21");
    }
    k.stage = static_cast<MatrixStage>(stage);

    const std::uint64_t d = k.m + k.n;
    if (k.m > (1ull << 31) || k.n > (1ull << 31)) {
        throw DataError(name + ": implausible dimensions in header at byte offset 5");
    }
    const std::uintmax_t expected = header_size + d * d * 8;
    std::error_code ec;
    const std::uintmax_t actual = std::filesystem::file_size(path, ec);
    if (!ec && actual < expected) {
        throw DataError(name + ": truncated payload, data ends at byte offset " + std::to_string(actual) +
                        " but " + std::to_string(expected) + " bytes are required");
    }
    if (!ec && actual > expected) {
        throw DataError(name + ": trailing data after byte offset " + std::to_string(expected));
    }

    const auto di = static_cast<Eigen::Index>(d);
    k.values.resize(di, di);
    std::vector<char> buffer(static_cast<std::size_t>(d) * 8);
    for (Eigen::Index i = 0; i < di; ++i) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        if (static_cast<std::size_t>(in.gcount()) != buffer.size()) {
            const std::uintmax_t offset =
                header_size + static_cast<std::uintmax_t>(i) * buffer.size() + static_cast<std::uintmax_t>(in.gcount());
            throw DataError(name + ": truncated payload at byte offset " + std::to_string(offset));
        }
        for (Eigen::Index j = 0; j < di; ++j) {
            k.values(i, j) = std::bit_cast<double>(get_u64(buffer.data() + 8 * j));
        }
    }
    return k;
}

}  // namespace tsk
