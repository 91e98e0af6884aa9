#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tsk/classifier.hpp"
#include "tsk/corpus.hpp"
#include "tsk/error.hpp"
#include "tsk/evaluation.hpp"
#include "tsk/kernel_matrix.hpp"
#include "tsk/ngram.hpp"
#include "tsk/tkc.hpp"
#include "tsk/unicode.hpp"

#include <sstream>

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;

namespace {

std::u32string prepared(const std::string &text, bool lowercase) { return tsk::preprocess(text, lowercase); }

py::dict profile_counts(const tsk::NGramProfile &profile) {
    py::dict d;
    for (const auto &e : profile.entries()) {
        d[py::str(tsk::encode_utf8(e.gram))] = e.count;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Transductive string kernels and the two-round transductive kernel classifier";

    auto base = py::register_exception<tsk::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<tsk::ContractError>(m, "ContractError", base.ptr());
    py::register_exception<tsk::DataError>(m, "DataError", base.ptr());
    py::register_exception<tsk::NumericalError>(m, "NumericalError", base.ptr());

    // n-gram kernels
    py::enum_<tsk::KernelFamily>(m, "KernelFamily")
        .value("presence", tsk::KernelFamily::presence)
        .value("intersection", tsk::KernelFamily::intersection)
        .value("spectrum", tsk::KernelFamily::spectrum);

    py::class_<tsk::KernelConfig>(m, "KernelConfig")
        .def(py::init([](tsk::KernelFamily family, int p_min, int p_max, bool lowercase) {
                 tsk::KernelConfig cfg{ family, p_min, p_max, lowercase };
                 cfg.validate();
                 return cfg;
             }),
             py::arg("family") = tsk::KernelFamily::presence, py::arg("p_min") = 5, py::arg("p_max") = 8,
             py::arg("lowercase") = true)
        .def_readwrite("family", &tsk::KernelConfig::family)
        .def_readwrite("p_min", &tsk::KernelConfig::p_min)
        .def_readwrite("p_max", &tsk::KernelConfig::p_max)
        .def_readwrite("lowercase", &tsk::KernelConfig::lowercase);

    py::class_<tsk::NGramProfile>(m, "NGramProfile")
        .def_property_readonly("p", &tsk::NGramProfile::order)
        .def_property_readonly("total", &tsk::NGramProfile::total)
        .def("counts", &profile_counts, "Mapping n-gram -> occurrence count")
        .def("__len__", &tsk::NGramProfile::distinct);

    m.def(
        "extract_profile",
        [](const std::string &text, int p, bool lowercase) {
            return tsk::NGramProfile::extract(prepared(text, lowercase), p);
        },
        py::arg("text"), py::arg("p"), py::arg("lowercase") = false,
        "Character n-gram counts of `text` (lowercasing is off unless asked)");
    m.def("kernel_value", &tsk::kernel_value, py::arg("a"), py::arg("b"), py::arg("family"));
    m.def(
        "blended_kernel",
        [](const std::string &x, const std::string &y, const tsk::KernelConfig &cfg) {
            return tsk::blended_kernel(x, y, cfg);
        },
        py::arg("x"), py::arg("y"), py::arg("config"));

    // transductive matrix
    py::enum_<tsk::MatrixStage>(m, "MatrixStage")
        .value("raw", tsk::MatrixStage::raw)
        .value("normalized", tsk::MatrixStage::normalized)
        .value("rbf", tsk::MatrixStage::rbf)
        .value("transductive", tsk::MatrixStage::transductive);

    py::class_<tsk::KernelMatrix>(m, "KernelMatrix")
        .def(py::init([](Eigen::MatrixXd values, std::size_t m_, std::size_t n_, tsk::MatrixStage stage) {
                 return tsk::KernelMatrix{ std::move(values), m_, n_, stage };
             }),
             py::arg("values"), py::arg("m"), py::arg("n"), py::arg("stage") = tsk::MatrixStage::raw)
        .def_readwrite("values", &tsk::KernelMatrix::values)
        .def_readonly("m", &tsk::KernelMatrix::m)
        .def_readonly("n", &tsk::KernelMatrix::n)
        .def_readonly("stage", &tsk::KernelMatrix::stage);

    m.def(
        "build_full_matrix",
        [](const std::vector<std::string> &train, const std::vector<std::string> &test, const tsk::KernelConfig &cfg,
           unsigned threads) {
            py::gil_scoped_release release;
            return tsk::build_full_matrix(train, test, cfg, threads);
        },
        py::arg("train"), py::arg("test"), py::arg("config"), py::arg("threads") = 1);
    m.def("normalize", [](const tsk::KernelMatrix &k) { return tsk::normalize(k); });
    m.def("rbf_transform", [](const tsk::KernelMatrix &k) { return tsk::rbf_transform(k); });
    m.def(
        "transductive_product",
        [](const tsk::KernelMatrix &k, unsigned threads) {
            py::gil_scoped_release release;
            return tsk::transductive_product(k, threads);
        },
        py::arg("k"), py::arg("threads") = 1);
    m.def(
        "transductive_kernel",
        [](const std::vector<std::string> &train, const std::vector<std::string> &test, const tsk::KernelConfig &cfg,
           tsk::MatrixStage last, unsigned threads) {
            py::gil_scoped_release release;
            return tsk::compute_kernel_pipeline(train, test, cfg, last, threads);
        },
        py::arg("train"), py::arg("test"), py::arg("config"), py::arg("last") = tsk::MatrixStage::transductive,
        py::arg("threads") = 1);
    m.def(
        "slice",
        [](const tsk::KernelMatrix &k, const std::vector<std::size_t> &rows, const std::vector<std::size_t> &cols) {
            return tsk::slice(k, rows, cols);
        },
        py::arg("k"), py::arg("rows"), py::arg("cols"));
    m.def("save_matrix", &tsk::save_matrix, py::arg("k"), py::arg("path"));
    m.def("load_matrix", &tsk::load_matrix, py::arg("path"));

    // classifier
    py::class_<tsk::DualModel>(m, "DualModel")
        .def_readonly("alpha", &tsk::DualModel::alpha)
        .def_readonly("bias", &tsk::DualModel::bias)
        .def_readonly("relative_residual", &tsk::DualModel::relative_residual);

    py::class_<tsk::ScoreTable>(m, "ScoreTable")
        .def_readonly("ova", &tsk::ScoreTable::ova)
        .def_readonly("predicted", &tsk::ScoreTable::predicted)
        .def_readonly("confidence", &tsk::ScoreTable::confidence);

    m.def(
        "encode_ova",
        [](const std::vector<tsk::ClassLabel> &labels, int classes) { return tsk::encode_ova(labels, classes); },
        py::arg("labels"), py::arg("classes"));
    m.def(
        "krr_fit",
        [](const Eigen::MatrixXd &k, const Eigen::VectorXd &t, double lambda) { return tsk::krr_fit(k, t, lambda); },
        py::arg("k_train"), py::arg("targets"), py::arg("lam"));
    m.def("score", &tsk::score, py::arg("k_test"), py::arg("model"));
    m.def("predict_ova", &tsk::predict_ova, py::arg("scores"));

    // tkc
    py::class_<tsk::TkcConfig>(m, "TkcConfig")
        .def(py::init([](std::size_t r, double lambda, int classes) { return tsk::TkcConfig{ r, lambda, classes }; }),
             py::arg("r") = 1000, py::arg("lam") = 1e-5, py::arg("classes") = 2)
        .def_readwrite("r", &tsk::TkcConfig::r)
        .def_readwrite("lam", &tsk::TkcConfig::lambda)
        .def_readwrite("classes", &tsk::TkcConfig::classes);

    py::class_<tsk::TkcTrace>(m, "TkcTrace")
        .def_readonly("round1", &tsk::TkcTrace::round1)
        .def_readonly("round2", &tsk::TkcTrace::round2)
        .def_readonly("order", &tsk::TkcTrace::order)
        .def_readonly("promoted", &tsk::TkcTrace::promoted)
        .def_readonly("pseudo_labels", &tsk::TkcTrace::pseudo_labels)
        .def_readonly("promoted_per_class", &tsk::TkcTrace::promoted_per_class)
        .def_property_readonly("final_labels", &tsk::TkcTrace::final_labels)
        .def("report", [](const tsk::TkcTrace &t) {
            std::ostringstream out;
            tsk::write_trace(out, t);
            return out.str();
        });

    m.def(
        "rank_by_confidence", [](const std::vector<double> &s) { return tsk::rank_by_confidence(s); },
        py::arg("scores"));
    m.def(
        "run_tkc",
        [](const tsk::KernelMatrix &k, const std::vector<tsk::ClassLabel> &labels, const tsk::TkcConfig &cfg) {
            py::gil_scoped_release release;
            return tsk::run_tkc(k, labels, cfg);
        },
        py::arg("kddot"), py::arg("train_labels"), py::arg("config") = tsk::TkcConfig{});
    m.def(
        "run_single_round",
        [](const tsk::KernelMatrix &k, const std::vector<tsk::ClassLabel> &labels, const tsk::TkcConfig &cfg) {
            py::gil_scoped_release release;
            return tsk::run_single_round(k, labels, cfg);
        },
        py::arg("kddot"), py::arg("train_labels"), py::arg("config") = tsk::TkcConfig{});

    // corpus
    py::class_<tsk::Document>(m, "Document")
        .def(py::init([](std::string id, std::string domain, std::optional<tsk::ClassLabel> label, std::string text) {
                 return tsk::Document{ std::move(id), std::move(domain), label, std::move(text) };
             }),
             py::arg("id"), py::arg("domain"), py::arg("label"), py::arg("text"))
        .def_readwrite("id", &tsk::Document::id)
        .def_readwrite("domain", &tsk::Document::domain)
        .def_readwrite("label", &tsk::Document::label)
        .def_readwrite("text", &tsk::Document::text)
        .def("__eq__", [](const tsk::Document &a, const tsk::Document &b) { return a == b; });

    m.def("label_from_rating", &tsk::label_from_rating, py::arg("rating"));
    m.def(
        "save_canonical",
        [](const std::vector<tsk::Document> &docs, const std::filesystem::path &p) { tsk::save_canonical(docs, p); },
        py::arg("docs"), py::arg("path"));
    m.def("load_canonical", &tsk::load_canonical, py::arg("path"));

    // evaluation
    py::enum_<tsk::McNemarMethod>(m, "McNemarMethod")
        .value("chi_squared_corrected", tsk::McNemarMethod::chi_squared_corrected)
        .value("exact_binomial", tsk::McNemarMethod::exact_binomial);

    py::class_<tsk::EvalResult>(m, "EvalResult")
        .def_readonly("accuracy", &tsk::EvalResult::accuracy)
        .def_readonly("n", &tsk::EvalResult::n)
        .def_readonly("correct", &tsk::EvalResult::correct);

    py::class_<tsk::McNemarResult>(m, "McNemarResult")
        .def_readonly("b", &tsk::McNemarResult::b)
        .def_readonly("c", &tsk::McNemarResult::c)
        .def_readonly("statistic", &tsk::McNemarResult::statistic)
        .def_readonly("p_value", &tsk::McNemarResult::p_value)
        .def_readonly("significant_at_0_01", &tsk::McNemarResult::significant_at_0_01)
        .def_readonly("method", &tsk::McNemarResult::method);

    m.def(
        "accuracy",
        [](const std::vector<tsk::ClassLabel> &p, const std::vector<tsk::ClassLabel> &g) { return tsk::accuracy(p, g); },
        py::arg("predicted"), py::arg("gold"));
    m.def(
        "mcnemar",
        [](const std::vector<tsk::ClassLabel> &a, const std::vector<tsk::ClassLabel> &b,
           const std::vector<tsk::ClassLabel> &g) { return tsk::mcnemar(a, b, g); },
        py::arg("predicted_a"), py::arg("predicted_b"), py::arg("gold"));
    m.def("mcnemar_from_counts", &tsk::mcnemar_from_counts, py::arg("b"), py::arg("c"));

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
