#include "tsk/commands.hpp"
#include "tsk/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

struct ExperimentFlags {
    std::string kernel = "presence";
    int p_min = 5;
    int p_max = 8;
    bool no_lowercase = false;
    std::string mode = "multi_source";
    std::vector<std::string> sources;
    std::string target;
    unsigned threads = 0;

    void attach(CLI::App &app) {
        app.add_option("--kernel", kernel, "String kernel family: presence, intersection or spectrum")
            ->capture_default_str();
        app.add_option("--p-min", p_min, "Shortest character n-gram")->capture_default_str();
        app.add_option("--p-max", p_max, "Longest character n-gram")->capture_default_str();
        app.add_flag("--no-lowercase", no_lowercase, "Keep letter case");
        app.add_option("--mode", mode, "multi_source or single_source")->capture_default_str();
        app.add_option("--source", sources, "Source domain (repeatable; multi-source default: all but the target)");
        app.add_option("--target", target, "Target (test) domain")->required();
        app.add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
    }

    tsk::ExperimentSpec spec() const {
        tsk::ExperimentSpec s;
        s.mode = tsk::parse_split_mode(mode);
        s.sources = sources;
        s.target = target;
        s.kernel.family = tsk::parse_kernel_family(kernel);
        s.kernel.p_min = p_min;
        s.kernel.p_max = p_max;
        s.kernel.lowercase = !no_lowercase;
        return s;
    }
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{ "Transductive string kernels for cross-domain text classification" };
    app.set_version_flag("--version", std::string(tsk::tool_version));
    app.require_subcommand(1);

    // ingest
    tsk::IngestOptions ingest;
    std::string ingest_input;
    auto *ingest_cmd = app.add_subcommand("ingest", "Convert Multi-Domain Sentiment review files to a canonical corpus");
    ingest_cmd->add_option("-i,--input", ingest_input,
                           std::string("Dataset directory (default: $") + tsk::dataset_env_var + ")");
    ingest_cmd->add_option("-o,--output", ingest.output, "Canonical corpus TSV to write")->required();

    // kernel
    tsk::KernelOptions kernel;
    ExperimentFlags kernel_flags;
    std::string stage = "transductive";
    auto *kernel_cmd = app.add_subcommand("kernel", "Compute and cache a kernel matrix for one split");
    kernel_cmd->add_option("--corpus", kernel.corpus, "Canonical corpus TSV")->required();
    kernel_cmd->add_option("--stage", stage, "Last stage: raw, normalized, rbf or transductive")->capture_default_str();
    kernel_cmd->add_option("-o,--out", kernel.cache_out, "Cache file to write")->required();
    kernel_flags.attach(*kernel_cmd);

    // run
    tsk::RunOptions run;
    ExperimentFlags run_flags;
    std::string cache;
    std::size_t r = 1000;
    double lambda = 1e-5;
    auto *run_cmd = app.add_subcommand("run", "Train and predict with the transductive kernel classifier");
    run_cmd->add_option("--corpus", run.corpus, "Canonical corpus TSV")->required();
    run_cmd->add_option("--cache", cache, "Transductive kernel cache from `tsk kernel`");
    run_cmd->add_option("--r", r, "Test samples promoted into the second round")->capture_default_str();
    run_cmd->add_option("--lambda", lambda, "Ridge regularisation")->capture_default_str();
    run_cmd->add_flag("--tkc,!--no-tkc", run.tkc, "Two-round transductive classifier (default) or a single round");
    run_cmd->add_option("--name", run.method, "Method name used in reports");
    run_cmd->add_option("-o,--out", run.out_dir, "Output directory")->required();
    run_flags.attach(*run_cmd);

    // report
    tsk::ReportOptions report;
    std::string tsv_out;
    auto *report_cmd = app.add_subcommand("report", "Tabulate run directories with McNemar markers");
    report_cmd->add_option("runs", report.runs, "Run output directories")->required();
    report_cmd->add_option("--baseline", report.baselines, "Baseline run directories (matched by setting)");
    report_cmd->add_option("--tsv", tsv_out, "Also write the table as TSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? tsk::exit_ok : tsk::exit_usage;
    }

    try {
        if (*ingest_cmd) {
            if (ingest_input.empty()) {
                const char *env = std::getenv(tsk::dataset_env_var);
                if (env == nullptr || *env == '\0') {
                    std::cerr << "error: no --input given and $" << tsk::dataset_env_var << " is not set\n";
                    return tsk::exit_usage;
                }
                ingest_input = env;
            }
            ingest.input_dir = ingest_input;
            tsk::cmd_ingest(ingest, std::cout);
        } else if (*kernel_cmd) {
            kernel.spec = kernel_flags.spec();
            kernel.stage = tsk::parse_matrix_stage(stage);
            kernel.threads = kernel_flags.threads;
            tsk::cmd_kernel(kernel, std::cout);
        } else if (*run_cmd) {
            run.spec = run_flags.spec();
            run.spec.tkc.r = r;
            run.spec.tkc.lambda = lambda;
            run.threads = run_flags.threads;
            if (!cache.empty()) {
                run.cache = cache;
            }
            tsk::cmd_run(run, std::cout);
        } else if (*report_cmd) {
            if (!tsv_out.empty()) {
                report.tsv_out = tsv_out;
            }
            std::cout << tsk::cmd_report(report);
        }
    } catch (const tsk::ContractError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return tsk::exit_usage;
    } catch (const tsk::NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return tsk::exit_numerical;
    } catch (const tsk::DataError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return tsk::exit_data;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return tsk::exit_data;
    }
    return tsk::exit_ok;
}
