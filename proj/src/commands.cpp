#include "tsk/commands.hpp"

#include "tsk/error.hpp"
#include "tsk/format.hpp"
#include "tsk/tkc.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

namespace tsk {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Writes through a temporary sibling and renames on success.
template <typename Writer>
void write_atomically(const fs::path &path, Writer &&writer) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".partial";
    try {
        writer(tmp);
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

void write_text(const fs::path &path, const std::string &text) {
    write_atomically(path, [&](const fs::path &tmp) {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot open " + tmp.string() + " for writing");
        }
        out << text;
        out.flush();
        if (!out) {
            throw DataError("write failed for " + tmp.string());
        }
    });
}

ordered_json read_json(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

ordered_json kernel_json(const KernelConfig &cfg) {
    return { { "family", to_string(cfg.family) },
             { "p_min", cfg.p_min },
             { "p_max", cfg.p_max },
             { "lowercase", cfg.lowercase } };
}

ordered_json split_json(const ExperimentSpec &spec, const Split &split) {
    return { { "mode", to_string(spec.mode) },
             { "sources", split.sources },
             { "target", spec.target },
             { "m", split.train.size() },
             { "n", split.test.size() } };
}

ordered_json file_json(const fs::path &path) {
    return { { "path", path.generic_string() }, { "sha256", file_sha256(path) } };
}

std::vector<std::string> texts_of(const std::vector<Document> &docs) {
    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const auto &d : docs) {
        texts.push_back(d.text);
    }
    return texts;
}

fs::path manifest_path_for(const fs::path &cache) {
    fs::path p = cache;
    p += ".manifest.json";
    return p;
}

struct LoadedRun {
    fs::path dir;
    std::string method;
    std::vector<std::string> sources;
    std::string target;
    std::vector<std::string> ids;
    std::vector<ClassLabel> gold;
    std::vector<ClassLabel> predicted;
};

LoadedRun load_run(const fs::path &dir) {
    LoadedRun run;
    run.dir = dir;
    const ordered_json manifest = read_json(dir / "manifest.json");
    try {
        run.method = manifest.at("method").get<std::string>();
        run.sources = manifest.at("split").at("sources").get<std::vector<std::string>>();
        run.target = manifest.at("split").at("target").get<std::string>();
    } catch (const nlohmann::json::exception &e) {
        throw DataError((dir / "manifest.json").string() + ": " + e.what());
    }

    const fs::path pred = dir / "predictions.tsv";
    std::ifstream in(pred, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + pred.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) {
            continue;  // header
        }
        std::istringstream fields(line);
        std::string id;
        std::string gold;
        std::string predicted;
        if (!std::getline(fields, id, '\t') || !std::getline(fields, gold, '\t') ||
            !std::getline(fields, predicted, '\t')) {
            throw DataError(pred.string() + ":" + std::to_string(line_no) + ": malformed prediction line");
        }
        const auto g = parse_label_name(gold);
        const auto p = parse_label_name(predicted);
        if (!g || !p) {
            continue;  // unlabeled test documents do not count towards accuracy
        }
        run.ids.push_back(id);
        run.gold.push_back(*g);
        run.predicted.push_back(*p);
    }
    if (run.ids.empty()) {
        throw DataError(pred.string() + ": no labelled predictions");
    }
    return run;
}

}  // namespace

std::string file_sha256(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string() + " for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 initialisation failed");
    }
    std::vector<char> buffer(1 << 20);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

std::string default_method_name(KernelFamily family, bool tkc) {
    return "transductive-" + std::string(to_string(family)) + (tkc ? "+TKC" : "");
}

IngestReport cmd_ingest(const IngestOptions &opts, std::ostream &log) {
    IngestResult result = ingest_mdsd(opts.input_dir);
    if (result.documents.empty()) {
        throw DataError("no labelled reviews found under " + opts.input_dir.string());
    }
    write_atomically(opts.output, [&](const fs::path &tmp) { save_canonical(result.documents, tmp); });

    const auto &report = result.report;
    log << "ingested " << result.documents.size() << " documents from " << opts.input_dir.string() << '\n';
    for (const auto &[domain, counts] : report.per_domain) {
        log << "  " << domain << ": " << counts.positive << " positive, " << counts.negative << " negative\n";
    }
    if (report.neutral_excluded) {
        log << "excluded " << report.neutral_excluded << " reviews rated exactly 3\n";
    }
    if (report.utf8_replacements) {
        log << "replaced " << report.utf8_replacements << " invalid UTF-8 sequences\n";
    }
    for (const auto &w : report.warnings) {
        log << "warning: " << w << '\n';
    }
    if (!report.errors.empty()) {
        log << report.errors.size() << " records skipped:\n";
        for (std::size_t i = 0; i < std::min<std::size_t>(report.errors.size(), 10); ++i) {
            log << "  " << report.errors[i] << '\n';
        }
    }
    return report;
}

void cmd_kernel(const KernelOptions &opts, std::ostream &log) {
    const std::vector<Document> docs = load_canonical(opts.corpus);
    const Split split = make_split(docs, opts.spec);
    log << "split " << setting_label(split.sources, opts.spec.target) << ": m=" << split.train.size()
        << " n=" << split.test.size() << '\n';

    const KernelMatrix k = compute_kernel_pipeline(texts_of(split.train), texts_of(split.test), opts.spec.kernel,
                                                   opts.stage, opts.threads);
    write_atomically(opts.cache_out, [&](const fs::path &tmp) { save_matrix(k, tmp); });

    ordered_json manifest = {
        { "tool", "tsk" },
        { "version", tool_version },
        { "command", "kernel" },
        { "kernel", kernel_json(opts.spec.kernel) },
        { "split", split_json(opts.spec, split) },
        { "stage", to_string(opts.stage) },
        { "label_inventory", label_names },
        { "inputs", { { "corpus", file_json(opts.corpus) } } },
        { "outputs", { { "cache", file_json(opts.cache_out) } } },
    };
    write_text(manifest_path_for(opts.cache_out), manifest.dump(2) + "\n");
    log << "wrote " << to_string(opts.stage) << " kernel matrix to " << opts.cache_out.string() << '\n';
}

RunOutputs cmd_run(const RunOptions &opts, std::ostream &log) {
    const std::vector<Document> docs = load_canonical(opts.corpus);
    const Split split = make_split(docs, opts.spec);
    const ExperimentSpec &spec = opts.spec;

    KernelMatrix k;
    ordered_json inputs = { { "corpus", file_json(opts.corpus) } };
    if (opts.cache) {
        k = load_matrix(*opts.cache);
        if (k.stage != MatrixStage::transductive) {
            throw DataError(opts.cache->string() + ": cache holds a " + std::string(to_string(k.stage)) +
                            " matrix; run needs the transductive stage");
        }
        if (k.m != split.train.size() || k.n != split.test.size()) {
            throw DataError(opts.cache->string() + ": cache is " + std::to_string(k.m) + "+" + std::to_string(k.n) +
                            " but the split is " + std::to_string(split.train.size()) + "+" +
                            std::to_string(split.test.size()));
        }
        const fs::path cache_manifest = manifest_path_for(*opts.cache);
        if (fs::exists(cache_manifest)) {
            const ordered_json cm = read_json(cache_manifest);
            if (cm.value("kernel", ordered_json{}) != kernel_json(spec.kernel) ||
                cm.value("split", ordered_json{}) != split_json(spec, split)) {
                throw DataError(opts.cache->string() + ": cache was built for a different kernel or split");
            }
        } else {
            log << "warning: no manifest next to " << opts.cache->string() << "; trusting its dimensions\n";
        }
        inputs["cache"] = file_json(*opts.cache);
    } else {
        k = compute_kernel_pipeline(texts_of(split.train), texts_of(split.test), spec.kernel,
                                    MatrixStage::transductive, opts.threads);
    }

    std::vector<ClassLabel> train_labels;
    train_labels.reserve(split.train.size());
    for (const auto &d : split.train) {
        train_labels.push_back(*d.label);
    }

    RunOutputs outputs;
    fs::create_directories(opts.out_dir);
    ScoreTable final_scores;
    if (opts.tkc) {
        TkcTrace trace = run_tkc(k, train_labels, spec.tkc);
        std::ostringstream trace_text;
        write_trace(trace_text, trace);
        outputs.trace = opts.out_dir / "trace.tsv";
        write_text(*outputs.trace, trace_text.str());
        final_scores = std::move(trace.round2);
    } else {
        final_scores = run_single_round(k, train_labels, spec.tkc);
    }

    std::ostringstream pred;
    pred << "id\tgold\tpredicted\tscore\n";
    std::vector<ClassLabel> gold;
    std::vector<ClassLabel> labelled_predictions;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
        const Document &d = split.test[i];
        const ClassLabel p = final_scores.predicted[i];
        pred << d.id << '\t' << label_name(d.label) << '\t' << label_name(p) << '\t'
             << format_double(final_scores.confidence(static_cast<Eigen::Index>(i))) << '\n';
        if (d.label) {
            gold.push_back(*d.label);
            labelled_predictions.push_back(p);
        }
    }
    outputs.predictions = opts.out_dir / "predictions.tsv";
    write_text(outputs.predictions, pred.str());

    const std::string method = opts.method.empty() ? default_method_name(spec.kernel.family, opts.tkc) : opts.method;
    ordered_json outputs_json = { { "predictions", file_json(outputs.predictions) } };
    if (outputs.trace) {
        outputs_json["trace"] = file_json(*outputs.trace);
    }
    if (!gold.empty()) {
        outputs.eval = accuracy(labelled_predictions, gold);
        ordered_json per_class = ordered_json::object();
        for (const auto &[label, counts] : outputs.eval->per_class) {
            per_class[std::string(label_name(label))] = {
                { "support", counts.support }, { "correct", counts.correct }, { "predicted", counts.predicted } };
        }
        const ordered_json eval = { { "method", method },
                                    { "accuracy", outputs.eval->accuracy },
                                    { "accuracy_percent", format_fixed(100.0 * outputs.eval->accuracy, 1) },
                                    { "n", outputs.eval->n },
                                    { "correct", outputs.eval->correct },
                                    { "per_class", per_class } };
        write_text(opts.out_dir / "eval.json", eval.dump(2) + "\n");
        outputs_json["eval"] = file_json(opts.out_dir / "eval.json");
        log << method << " " << setting_label(split.sources, spec.target) << ": accuracy "
            << format_fixed(100.0 * outputs.eval->accuracy, 1) << "% (" << outputs.eval->correct << "/"
            << outputs.eval->n << ")\n";
    }

    const ordered_json manifest = {
        { "tool", "tsk" },
        { "version", tool_version },
        { "command", "run" },
        { "method", method },
        { "kernel", kernel_json(spec.kernel) },
        { "split", split_json(spec, split) },
        { "tkc", { { "enabled", opts.tkc }, { "r", spec.tkc.r }, { "lambda", spec.tkc.lambda }, { "classes", spec.tkc.classes } } },
        { "label_inventory", label_names },
        { "inputs", inputs },
        { "outputs", outputs_json },
    };
    write_text(opts.out_dir / "manifest.json", manifest.dump(2) + "\n");
    return outputs;
}

std::string cmd_report(const ReportOptions &opts) {
    std::vector<LoadedRun> baselines;
    for (const auto &dir : opts.baselines) {
        baselines.push_back(load_run(dir));
    }

    std::vector<LoadedRun> runs;
    for (const auto &dir : opts.runs) {
        runs.push_back(load_run(dir));
    }
    for (std::size_t a = 0; a < runs.size(); ++a) {
        for (std::size_t b = a + 1; b < runs.size(); ++b) {
            const bool same_setting = runs[a].target == runs[b].target && runs[a].sources == runs[b].sources;
            if (same_setting && (runs[a].ids != runs[b].ids || runs[a].gold != runs[b].gold)) {
                throw DataError("runs " + runs[a].dir.string() + " and " + runs[b].dir.string() +
                                " share a setting but not a test set");
            }
        }
    }

    std::vector<ReportEntry> entries;
    for (const auto &run : runs) {
        ReportEntry entry;
        entry.method = run.method;
        entry.sources = run.sources;
        entry.target = run.target;
        entry.eval = accuracy(run.predicted, run.gold);

        for (const auto &base : baselines) {
            if (base.target != run.target || base.sources != run.sources) {
                continue;
            }
            if (base.ids != run.ids || base.gold != run.gold) {
                throw DataError("runs " + run.dir.string() + " and " + base.dir.string() +
                                " share a setting but not a test set");
            }
            if (!fs::equivalent(base.dir, run.dir)) {
                entry.vs_baseline = mcnemar(run.predicted, base.predicted, run.gold);
            }
            break;
        }
        entries.push_back(std::move(entry));
    }

    const std::string tsv = format_tsv(entries);
    if (opts.tsv_out) {
        write_text(*opts.tsv_out, tsv);
    }
    return format_table(entries);
}

}  // namespace tsk
