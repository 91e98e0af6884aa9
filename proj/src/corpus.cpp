#include "tsk/corpus.hpp"

#include "tsk/error.hpp"
#include "tsk/unicode.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace tsk {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

// Content of the first <tag>...</tag> inside block, if any.
std::optional<std::string_view> element(std::string_view block, std::string_view tag) {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    const auto start = block.find(open);
    if (start == std::string_view::npos) {
        return std::nullopt;
    }
    const auto body = start + open.size();
    const auto end = block.find(close, body);
    if (end == std::string_view::npos) {
        return std::nullopt;
    }
    return trim(block.substr(body, end - body));
}

std::string sanitize_id(std::string_view raw) {
    std::string id(raw);
    for (char &c : id) {
        if (c == '\t' || c == '\n' || c == '\r') {
            c = '_';
        }
    }
    return id;
}

bool by_domain_then_id(const Document &a, const Document &b) {
    return std::tie(a.domain, a.id) < std::tie(b.domain, b.id);
}

}  // namespace

std::optional<ClassLabel> label_from_rating(double rating) {
    if (rating > 3.0) {
        return positive_label;
    }
    if (rating < 3.0) {
        return negative_label;
    }
    return std::nullopt;
}

std::string_view label_name(std::optional<ClassLabel> label) {
    if (!label) {
        return "unlabeled";
    }
    return label_names.at(static_cast<std::size_t>(*label - 1));
}

std::optional<ClassLabel> parse_label_name(std::string_view name) {
    if (name == "unlabeled") {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < label_names.size(); ++i) {
        if (name == label_names[i]) {
            return static_cast<ClassLabel>(i + 1);
        }
    }
    throw DataError("unknown label '" + std::string(name) + "'");
}

void parse_review_file(std::string_view content,
                       std::string_view domain,
                       std::string_view source,
                       std::vector<Document> &out,
                       IngestReport &report) {
    constexpr std::string_view open = "<review>";
    constexpr std::string_view close = "</review>";
    std::size_t pos = 0;
    std::size_t ordinal = 0;
    while ((pos = content.find(open, pos)) != std::string_view::npos) {
        const std::size_t body = pos + open.size();
        std::size_t end = content.find(close, body);
        const std::string_view block = content.substr(body, end == std::string_view::npos ? end : end - body);
        pos = end == std::string_view::npos ? content.size() : end + close.size();
        ++ordinal;
        ++report.reviews_seen;

        const std::string where = std::string(source) + ": review " + std::to_string(ordinal);
        const auto rating_text = element(block, "rating");
        if (!rating_text || rating_text->empty()) {
            report.errors.push_back(where + ": missing rating");
            continue;
        }
        double rating = 0.0;
        const auto [ptr, ec] = std::from_chars(rating_text->data(), rating_text->data() + rating_text->size(), rating);
        if (ec != std::errc{} || ptr != rating_text->data() + rating_text->size()) {
            report.errors.push_back(where + ": unparseable rating '" + std::string(*rating_text) + "'");
            continue;
        }
        const auto text = element(block, "review_text");
        if (!text || text->empty()) {
            report.errors.push_back(where + ": missing review text");
            continue;
        }
        const auto label = label_from_rating(rating);
        if (!label) {
            ++report.neutral_excluded;
            continue;
        }

        Document doc;
        doc.domain = std::string(domain);
        const auto unique_id = element(block, "unique_id");
        std::string local;
        if (unique_id && !unique_id->empty()) {
            local = sanitize_id(*unique_id);
        } else {
            std::filesystem::path stem(std::string{ source });
            local = stem.stem().string() + "-" + std::to_string(ordinal);
        }
        doc.id = doc.domain + "/" + local;
        doc.label = label;
        report.utf8_replacements += sanitize_utf8(*text, doc.text).replacements;
        out.push_back(std::move(doc));
    }
}

IngestResult ingest_mdsd(const std::filesystem::path &root) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw DataError("dataset directory not found: " + root.string());
    }

    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        const auto name = it->path().filename().string();
        if (it->is_regular_file() && (name == "positive.review" || name == "negative.review")) {
            files.push_back(it->path());
        }
    }
    if (files.empty()) {
        throw DataError("no positive.review / negative.review files under " + root.string());
    }
    std::sort(files.begin(), files.end());

    IngestResult result;
    for (const auto &file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            result.report.errors.push_back(file.string() + ": unreadable");
            continue;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        const std::string domain = file.parent_path().filename().string();
        parse_review_file(buffer.str(), domain, file.string(), result.documents, result.report);
    }

    std::stable_sort(result.documents.begin(), result.documents.end(), by_domain_then_id);
    // Same unique_id twice in a domain: keep both, suffix the later ones.
    std::set<std::string> seen;
    for (auto &doc : result.documents) {
        if (!seen.insert(doc.id).second) {
            const std::string base = doc.id;
            for (int k = 2;; ++k) {
                doc.id = base + "#" + std::to_string(k);
                if (seen.insert(doc.id).second) {
                    break;
                }
            }
        }
    }
    std::stable_sort(result.documents.begin(), result.documents.end(), by_domain_then_id);

    for (const auto &doc : result.documents) {
        auto &counts = result.report.per_domain[doc.domain];
        (*doc.label == positive_label ? counts.positive : counts.negative) += 1;
    }
    for (const auto &[domain, counts] : result.report.per_domain) {
        if (counts.positive != 1000 || counts.negative != 1000) {
            result.report.warnings.push_back("domain " + domain + " has " + std::to_string(counts.positive) +
                                             " positive / " + std::to_string(counts.negative) +
                                             " negative reviews (expected 1000 / 1000)");
        }
    }
    for (auto d : mdsd_domains) {
        if (!result.report.per_domain.contains(std::string(d))) {
            result.report.warnings.push_back("domain " + std::string(d) + " not found");
        }
    }
    return result;
}

std::string escape_field(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '\\':
                out += "\\\\";
                break;
            case '\t':
                out += "\\t";
                break;
            case '\n':
                out += "\\n";
                break;
            case '\r':
                out += "\\r";
                break;
            default:
                out.push_back(c);
        }
    }
    return out;
}

std::string unescape_field(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out.push_back(text[i]);
            continue;
        }
        if (++i == text.size()) {
            throw DataError("dangling backslash at end of field");
        }
        switch (text[i]) {
            case '\\':
                out.push_back('\\');
                break;
            case 't':
                out.push_back('\t');
                break;
            case 'n':
                out.push_back('\n');
                break;
            case 'r':
                out.push_back('\r');
                break;
            default:
                throw DataError(std::string("unknown escape \\") + text[i]);
        }
    }
    return out;
}

void write_canonical(std::ostream &out, std::span<const Document> docs) {
    for (const auto &doc : docs) {
        if (doc.id.find_first_of("\t\n\r") != std::string::npos ||
            doc.domain.find_first_of("\t\n\r") != std::string::npos) {
            throw DataError("document id/domain may not contain tabs or newlines: " + doc.id);
        }
        out << doc.id << '\t' << doc.domain << '\t' << label_name(doc.label) << '\t' << escape_field(doc.text)
            << '\n';
    }
}

std::vector<Document> read_canonical(std::istream &in, std::string_view source) {
    std::vector<Document> docs;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto tab = rest.find('\t');
            fields.push_back(rest.substr(0, tab));
            if (tab == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(tab + 1);
        }
        if (fields.size() != 4) {
            throw DataError(where + "expected 4 tab-separated fields, found " + std::to_string(fields.size()));
        }
        Document doc;
        doc.id = std::string(fields[0]);
        doc.domain = std::string(fields[1]);
        if (doc.id.empty() || doc.domain.empty()) {
            throw DataError(where + "empty id or domain");
        }
        try {
            doc.label = parse_label_name(fields[2]);
            doc.text = unescape_field(fields[3]);
        } catch (const DataError &e) {
            throw DataError(where + e.what());
        }
        if (doc.text.empty()) {
            throw DataError(where + "empty text");
        }
        if (!ids.insert(doc.id).second) {
            throw DataError(where + "duplicate id " + doc.id);
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

void save_canonical(std::span<const Document> docs, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    write_canonical(out, docs);
    out.flush();
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

std::vector<Document> load_canonical(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open corpus " + path.string());
    }
    return read_canonical(in, path.string());
}

std::string_view to_string(SplitMode mode) {
    return mode == SplitMode::multi_source ? "multi_source" : "single_source";
}

SplitMode parse_split_mode(std::string_view name) {
    if (name == "multi_source" || name == "multi") {
        return SplitMode::multi_source;
    }
    if (name == "single_source" || name == "single") {
        return SplitMode::single_source;
    }
    throw ContractError("unknown split mode: " + std::string(name));
}

void ExperimentSpec::validate() const {
    if (target.empty()) {
        throw ContractError("experiment needs a target domain");
    }
    if (std::find(sources.begin(), sources.end(), target) != sources.end()) {
        throw ContractError("target domain " + target + " is also a source domain");
    }
    if (mode == SplitMode::single_source && sources.size() != 1) {
        throw ContractError("single-source experiments need exactly one source domain");
    }
    kernel.validate();
    if (!(tkc.lambda > 0.0)) {
        throw ContractError("lambda must be positive");
    }
}

Split make_split(std::span<const Document> docs, const ExperimentSpec &spec) {
    spec.validate();

    std::map<std::string, std::size_t> labelled;
    std::map<std::string, std::size_t> total;
    for (const auto &doc : docs) {
        ++total[doc.domain];
        if (doc.label) {
            ++labelled[doc.domain];
        }
    }

    Split split;
    split.sources = spec.sources;
    if (split.sources.empty()) {
        for (const auto &[domain, count] : labelled) {
            if (domain != spec.target) {
                split.sources.push_back(domain);
            }
        }
    }
    std::sort(split.sources.begin(), split.sources.end());
    if (split.sources.empty()) {
        throw DataError("no labelled source domains besides " + spec.target);
    }
    for (const auto &domain : split.sources) {
        if (labelled[domain] == 0) {
            throw DataError("source domain " + domain + " is absent or has no labelled documents");
        }
    }
    if (total[spec.target] == 0) {
        throw DataError("target domain " + spec.target + " is absent or empty");
    }

    const std::set<std::string> source_set(split.sources.begin(), split.sources.end());
    for (const auto &doc : docs) {
        if (doc.domain == spec.target) {
            split.test.push_back(doc);
        } else if (doc.label && source_set.contains(doc.domain)) {
            split.train.push_back(doc);
        }
    }
    std::sort(split.train.begin(), split.train.end(), by_domain_then_id);
    std::sort(split.test.begin(), split.test.end(), by_domain_then_id);
    return split;
}

}  // namespace tsk
