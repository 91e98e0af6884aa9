#pragma once

#include "tsk/classifier.hpp"
#include "tsk/ngram.hpp"
#include "tsk/tkc.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsk {

// Label inventory in class-index order: negative = 1, positive = 2.
inline constexpr std::array<std::string_view, 2> label_names{ "negative", "positive" };
inline constexpr ClassLabel negative_label = 1;
inline constexpr ClassLabel positive_label = 2;

inline constexpr std::array<std::string_view, 4> mdsd_domains{ "books", "dvd", "electronics", "kitchen" };

struct Document {
    std::string id;
    std::string domain;
    std::optional<ClassLabel> label;
    std::string text;  // UTF-8

    bool operator==(const Document &) const = default;
};

// Star rating to polarity: above 3 is positive, below 3 negative, exactly 3
// has no label.
std::optional<ClassLabel> label_from_rating(double rating);

std::string_view label_name(std::optional<ClassLabel> label);
std::optional<ClassLabel> parse_label_name(std::string_view name);  // throws DataError

struct DomainCounts {
    std::size_t positive = 0;
    std::size_t negative = 0;
};

struct IngestReport {
    std::size_t reviews_seen = 0;
    std::size_t neutral_excluded = 0;
    std::size_t utf8_replacements = 0;
    std::map<std::string, DomainCounts> per_domain;
    std::vector<std::string> errors;    // per-record problems; the record is skipped
    std::vector<std::string> warnings;  // dataset integrity notes
};

struct IngestResult {
    std::vector<Document> documents;  // sorted by (domain, id)
    IngestReport report;
};

// Parses one pseudo-XML review file (not well-formed XML, so this is a tag
// scanner). `source` names the file in error messages.
void parse_review_file(std::string_view content,
                       std::string_view domain,
                       std::string_view source,
                       std::vector<Document> &out,
                       IngestReport &report);

// Walks `root` for positive.review / negative.review files; the parent
// directory name is the domain. Throws DataError when nothing is found.
IngestResult ingest_mdsd(const std::filesystem::path &root);

// Canonical TSV: id<TAB>domain<TAB>label<TAB>text, text escaped with
// \t \n \r \\ .
void write_canonical(std::ostream &out, std::span<const Document> docs);
std::vector<Document> read_canonical(std::istream &in, std::string_view source = "<stream>");
void save_canonical(std::span<const Document> docs, const std::filesystem::path &path);
std::vector<Document> load_canonical(const std::filesystem::path &path);

std::string escape_field(std::string_view text);
std::string unescape_field(std::string_view text);  // throws DataError on a bad escape

enum class SplitMode { multi_source, single_source };

std::string_view to_string(SplitMode mode);
SplitMode parse_split_mode(std::string_view name);

struct ExperimentSpec {
    SplitMode mode = SplitMode::multi_source;
    std::vector<std::string> sources;  // empty in multi-source: every other domain in the corpus
    std::string target;
    KernelConfig kernel;
    TkcConfig tkc;

    void validate() const;  // throws ContractError
};

struct Split {
    std::vector<Document> train;  // labelled documents of the source domains
    std::vector<Document> test;   // every document of the target domain
    std::vector<std::string> sources;
};

// Both halves ordered by (domain, id). Throws ContractError when the target
// is also a source, DataError when a named domain is missing or empty.
Split make_split(std::span<const Document> docs, const ExperimentSpec &spec);

}  // namespace tsk
