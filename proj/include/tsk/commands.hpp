#pragma once

#include "tsk/corpus.hpp"
#include "tsk/evaluation.hpp"
#include "tsk/kernel_matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tsk {

inline constexpr std::string_view tool_version = "0.1.0";

// Environment variable naming the default dataset directory for `ingest`.
inline constexpr const char *dataset_env_var = "TSK_DATASET_DIR";

// Process exit codes.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_numerical = 3 };

// Lower-case hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path &path);

struct IngestOptions {
    std::filesystem::path input_dir;
    std::filesystem::path output;
};

IngestReport cmd_ingest(const IngestOptions &opts, std::ostream &log);

struct KernelOptions {
    std::filesystem::path corpus;
    ExperimentSpec spec;
    MatrixStage stage = MatrixStage::transductive;
    std::filesystem::path cache_out;
    unsigned threads = 0;  // 0: all hardware threads
};

// Writes the cache file and `<cache>.manifest.json`. A failed run leaves no
// partial cache behind.
void cmd_kernel(const KernelOptions &opts, std::ostream &log);

struct RunOptions {
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> cache;  // transductive cache from cmd_kernel
    ExperimentSpec spec;
    bool tkc = true;
    std::string method;  // empty: derived from kernel family and tkc flag
    std::filesystem::path out_dir;
    unsigned threads = 0;
};

struct RunOutputs {
    std::filesystem::path predictions;
    std::optional<std::filesystem::path> trace;
    std::optional<EvalResult> eval;
};

// Writes predictions.tsv, eval.json (when the test set is labelled),
// trace.tsv (TKC only) and manifest.json into out_dir.
RunOutputs cmd_run(const RunOptions &opts, std::ostream &log);

struct ReportOptions {
    std::vector<std::filesystem::path> runs;
    std::vector<std::filesystem::path> baselines;  // matched to runs by setting
    std::optional<std::filesystem::path> tsv_out;
};

// Aggregates run directories into a methods x settings table. Throws
// DataError when runs on the same setting disagree on the test set.
std::string cmd_report(const ReportOptions &opts);

std::string default_method_name(KernelFamily family, bool tkc);

}  // namespace tsk
