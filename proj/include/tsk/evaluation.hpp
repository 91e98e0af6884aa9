#pragma once

#include "tsk/classifier.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsk {

struct ClassCounts {
    std::size_t support = 0;  // gold occurrences
    std::size_t correct = 0;
    std::size_t predicted = 0;
};

struct EvalResult {
    double accuracy = 0.0;
    std::size_t n = 0;
    std::size_t correct = 0;
    std::map<ClassLabel, ClassCounts> per_class;
};

// Throws ContractError on a length mismatch or empty input.
EvalResult accuracy(std::span<const ClassLabel> predicted, std::span<const ClassLabel> gold);

enum class McNemarMethod { chi_squared_corrected, exact_binomial };

std::string_view to_string(McNemarMethod method);

struct McNemarResult {
    std::size_t b = 0;  // A right, B wrong
    std::size_t c = 0;  // A wrong, B right
    double statistic = 0.0;  // chi-squared value, or min(b, c) for the exact test
    double p_value = 1.0;
    bool significant_at_0_01 = false;
    McNemarMethod method = McNemarMethod::exact_binomial;
};

// 0.99 quantile of chi-squared with one degree of freedom.
inline constexpr double chi2_1dof_critical_0_01 = 6.634896601021214;

// Continuity-corrected statistic (|b - c| - 1)^2 / (b + c).
McNemarResult mcnemar_chi_squared(std::size_t b, std::size_t c);
// Two-sided exact binomial test on b successes out of b + c at p = 1/2.
McNemarResult mcnemar_exact(std::size_t b, std::size_t c);
// Chi-squared when b + c >= 25, exact otherwise.
McNemarResult mcnemar_from_counts(std::size_t b, std::size_t c);

McNemarResult mcnemar(std::span<const ClassLabel> predicted_a,
                      std::span<const ClassLabel> predicted_b,
                      std::span<const ClassLabel> gold);

/// One cell of a results table.
struct ReportEntry {
    std::string method;
    std::vector<std::string> sources;
    std::string target;
    EvalResult eval;
    std::optional<McNemarResult> vs_baseline;

    // Significant and better than the baseline (more b than c).
    [[nodiscard]] bool significant() const;
};

// "DEK->B" style setting label from domain initials.
std::string setting_label(std::span<const std::string> sources, std::string_view target);

// Rows are methods, columns settings, both in first-appearance order.
// Accuracy in percent with one decimal, '*' marks significant entries.
std::string format_table(std::span<const ReportEntry> entries);

// Columns: method, source_domains, target_domain, accuracy_percent,
// significant_vs_baseline, mcnemar_statistic, mcnemar_method.
std::string format_tsv(std::span<const ReportEntry> entries);

}  // namespace tsk
