#include "tsk/classifier.hpp"

#include "tsk/error.hpp"

#include <cmath>
#include <string>

namespace tsk {

namespace {

constexpr int max_refinement_steps = 10;

// r = t - (K + lambda I) x, accumulated in long double.
Eigen::VectorXd residual(const Eigen::MatrixXd &k, double lambda, const Eigen::VectorXd &x, const Eigen::VectorXd &t,
                         long double &norm) {
    const Eigen::Index d = k.rows();
    std::vector<long double> acc(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        acc[static_cast<std::size_t>(i)] = static_cast<long double>(t(i)) -
                                           static_cast<long double>(lambda) * static_cast<long double>(x(i));
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        const long double xj = x(j);
        const double *col = k.col(j).data();
        for (Eigen::Index i = 0; i < d; ++i) {
            acc[static_cast<std::size_t>(i)] -= static_cast<long double>(col[i]) * xj;
        }
    }
    Eigen::VectorXd r(d);
    long double sq = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const long double v = acc[static_cast<std::size_t>(i)];
        sq += v * v;
        r(i) = static_cast<double>(v);
    }
    norm = std::sqrt(sq);
    return r;
}

}  // namespace

Eigen::MatrixXd encode_ova(std::span<const ClassLabel> labels, int classes) {
    if (classes < 1) {
        throw ContractError("encode_ova: class count must be positive");
    }
    Eigen::MatrixXd targets = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(labels.size()), classes, -1.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const ClassLabel label = labels[i];
        if (label < 1 || label > classes) {
            throw ContractError("encode_ova: label " + std::to_string(label) + " at position " + std::to_string(i) +
                                " outside 1.." + std::to_string(classes));
        }
        targets(static_cast<Eigen::Index>(i), label - 1) = 1.0;
    }
    return targets;
}

KrrSolver::KrrSolver(const Eigen::MatrixXd &k_train, double lambda) : kernel_(k_train), lambda_(lambda) {
    if (k_train.rows() != k_train.cols()) {
        throw ContractError("krr: training kernel must be square");
    }
    if (!(lambda > 0.0)) {
        throw ContractError("krr: lambda must be positive");
    }
    Eigen::MatrixXd regularized = k_train;
    regularized.diagonal().array() += lambda;
    llt_.compute(regularized);
    if (llt_.info() != Eigen::Success) {
        throw NumericalError("krr: K + lambda I is not positive definite (dimension " +
                             std::to_string(k_train.rows()) + ")");
    }
}

DualModel KrrSolver::fit(const Eigen::VectorXd &targets) const {
    if (targets.size() != kernel_.rows()) {
        throw ContractError("krr: target length does not match the kernel dimension");
    }
    DualModel model;
    const double t_norm = targets.norm();
    if (t_norm == 0.0) {
        model.alpha = Eigen::VectorXd::Zero(targets.size());
        return model;
    }

    Eigen::VectorXd alpha = llt_.solve(targets);
    long double r_norm = 0;
    Eigen::VectorXd r = residual(kernel_, lambda_, alpha, targets, r_norm);
    for (int step = 0; step < max_refinement_steps; ++step) {
        if (r_norm <= 1e-3L * krr_residual_tolerance * t_norm) {
            break;
        }
        const Eigen::VectorXd candidate = alpha + llt_.solve(r);
        long double c_norm = 0;
        Eigen::VectorXd c_r = residual(kernel_, lambda_, candidate, targets, c_norm);
        if (!(c_norm < r_norm)) {
            break;
        }
        alpha = candidate;
        r = std::move(c_r);
        r_norm = c_norm;
    }

    model.alpha = std::move(alpha);
    model.relative_residual = static_cast<double>(r_norm / t_norm);
    if (!(model.relative_residual <= krr_residual_tolerance)) {
        throw NumericalError("krr: relative residual " + std::to_string(model.relative_residual) + " exceeds " +
                             std::to_string(krr_residual_tolerance));
    }
    return model;
}

DualModel krr_fit(const Eigen::MatrixXd &k_train, const Eigen::VectorXd &targets, double lambda) {
    return KrrSolver(k_train, lambda).fit(targets);
}

Eigen::VectorXd score(const Eigen::MatrixXd &k_test, const DualModel &model) {
    if (k_test.cols() != model.alpha.size()) {
        throw ContractError("score: test kernel has " + std::to_string(k_test.cols()) + " columns but the model has " +
                            std::to_string(model.alpha.size()) + " dual weights");
    }
    Eigen::VectorXd s = k_test * model.alpha;
    s.array() += model.bias;
    return s;
}

ScoreTable predict_ova(const Eigen::MatrixXd &ova_scores) {
    if (ova_scores.cols() < 2) {
        throw ContractError("predict_ova: need at least two classes");
    }
    ScoreTable table;
    table.ova = ova_scores;
    const Eigen::Index n = ova_scores.rows();
    table.predicted.resize(static_cast<std::size_t>(n));
    table.confidence.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < ova_scores.cols(); ++c) {
            if (ova_scores(i, c) > ova_scores(i, best)) {
                best = c;
            }
        }
        table.predicted[static_cast<std::size_t>(i)] = static_cast<ClassLabel>(best + 1);
        table.confidence(i) = ova_scores(i, best);
    }
    return table;
}

ScoreTable fit_predict(const Eigen::MatrixXd &k_train,
                       const Eigen::MatrixXd &k_test,
                       std::span<const ClassLabel> labels,
                       int classes,
                       double lambda) {
    if (static_cast<Eigen::Index>(labels.size()) != k_train.rows()) {
        throw ContractError("fit_predict: label count does not match the training kernel");
    }
    const Eigen::MatrixXd targets = encode_ova(labels, classes);
    const KrrSolver solver(k_train, lambda);
    Eigen::MatrixXd ova(k_test.rows(), classes);
    for (int c = 0; c < classes; ++c) {
        ova.col(c) = score(k_test, solver.fit(targets.col(c)));
    }
    return predict_ova(ova);
}

}  // namespace tsk
