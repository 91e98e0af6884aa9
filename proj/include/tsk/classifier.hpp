#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <span>
#include <vector>

namespace tsk {

// Class labels are 1-based dense indices (1..c); sample positions are 0-based.
using ClassLabel = int;

// One-versus-all targets: row i is -1 everywhere except +1 at column
// labels[i]. Throws ContractError for a label outside 1..classes.
Eigen::MatrixXd encode_ova(std::span<const ClassLabel> labels, int classes);

/// Dual weights of a kernel classifier. Ridge regression has no intercept,
/// so bias stays 0; the slot is kept for classifiers that do.
struct DualModel {
    Eigen::VectorXd alpha;
    double bias = 0.0;
    double relative_residual = 0.0;  // ||(K + lambda I) alpha - t|| / ||t||
};

// Residual bound every fitted model satisfies.
inline constexpr double krr_residual_tolerance = 1e-8;

/// Kernel ridge regression in dual form: solves (K + lambda I) alpha = t.
/// The Cholesky factor is computed once and shared by every target vector,
/// which is what the one-versus-all loop needs. Solutions are polished by
/// iterative refinement with an extended-precision residual.
class KrrSolver {
  public:
    // Throws ContractError for a non-square K or lambda <= 0, NumericalError
    // when K + lambda I is not positive definite.
    KrrSolver(const Eigen::MatrixXd &k_train, double lambda);
    // The solver keeps a reference to the kernel for residual checks.
    KrrSolver(Eigen::MatrixXd &&, double) = delete;

    // Throws NumericalError when the residual bound cannot be met.
    [[nodiscard]] DualModel fit(const Eigen::VectorXd &targets) const;

    [[nodiscard]] Eigen::Index size() const noexcept { return kernel_.rows(); }

  private:
    const Eigen::MatrixXd &kernel_;
    double lambda_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

DualModel krr_fit(const Eigen::MatrixXd &k_train, const Eigen::VectorXd &targets, double lambda);

// K_test * alpha + bias. Throws ContractError when K_test has the wrong
// number of columns.
Eigen::VectorXd score(const Eigen::MatrixXd &k_test, const DualModel &model);

struct ScoreTable {
    Eigen::MatrixXd ova;                // n x c raw scores
    std::vector<ClassLabel> predicted;  // argmax per row, 1-based
    Eigen::VectorXd confidence;         // max per row
};

// Argmax/max per row; ties go to the lowest class index.
ScoreTable predict_ova(const Eigen::MatrixXd &ova_scores);

// One round of one-versus-all training and prediction on a kernel block pair.
ScoreTable fit_predict(const Eigen::MatrixXd &k_train,
                       const Eigen::MatrixXd &k_test,
                       std::span<const ClassLabel> labels,
                       int classes,
                       double lambda);

}  // namespace tsk
