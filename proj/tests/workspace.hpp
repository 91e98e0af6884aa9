#pragma once

// Scratch directories and on-disk dataset layouts for command-level tests.

#include "synthetic.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace workspace {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string &tag) {
        static std::atomic<int> counter{ 0 };
        path_ = fs::temp_directory_path() /
                ("tsk_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const fs::path &path() const { return path_; }
    fs::path operator/(const std::string &name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_file(const fs::path &p, const std::string &content) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
}

inline std::string read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

// Lays the synthetic reviews out as <root>/<domain>/{positive,negative}.review.
inline void write_mdsd(const fs::path &root, const synthetic::CorpusShape &shape) {
    const auto docs = synthetic::make_corpus(shape);
    for (const auto &d : shape.domains) {
        write_file(root / d / "positive.review", synthetic::review_file(docs, d, 2));
        write_file(root / d / "negative.review", synthetic::review_file(docs, d, 1));
    }
}

inline std::string quote(const fs::path &p) { return "'" + p.string() + "'"; }

// Runs the CLI with stdout/stderr captured to `log`; returns the exit status.
inline int run_cli(const std::string &binary, const std::string &args, const fs::path &log) {
    const std::string cmd = quote(binary) + " " + args + " >" + quote(log) + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace workspace
