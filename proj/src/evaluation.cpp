#include "tsk/evaluation.hpp"

#include "tsk/error.hpp"
#include "tsk/format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace tsk {

EvalResult accuracy(std::span<const ClassLabel> predicted, std::span<const ClassLabel> gold) {
    if (predicted.size() != gold.size()) {
        throw ContractError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                            std::to_string(gold.size()) + " gold labels");
    }
    if (gold.empty()) {
        throw ContractError("accuracy: no samples");
    }
    EvalResult result;
    result.n = gold.size();
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ++result.per_class[gold[i]].support;
        ++result.per_class[predicted[i]].predicted;
        if (predicted[i] == gold[i]) {
            ++result.correct;
            ++result.per_class[gold[i]].correct;
        }
    }
    result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.n);
    return result;
}

std::string_view to_string(McNemarMethod method) {
    return method == McNemarMethod::chi_squared_corrected ? "chi_squared_corrected" : "exact_binomial";
}

McNemarResult mcnemar_chi_squared(std::size_t b, std::size_t c) {
    McNemarResult r;
    r.b = b;
    r.c = c;
    r.method = McNemarMethod::chi_squared_corrected;
    if (b + c == 0) {
        return r;
    }
    const double diff = std::abs(static_cast<double>(b) - static_cast<double>(c)) - 1.0;
    r.statistic = diff * diff / static_cast<double>(b + c);
    r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));
    r.significant_at_0_01 = r.statistic > chi2_1dof_critical_0_01;
    return r;
}

McNemarResult mcnemar_exact(std::size_t b, std::size_t c) {
    McNemarResult r;
    r.b = b;
    r.c = c;
    r.method = McNemarMethod::exact_binomial;
    const std::size_t n = b + c;
    const std::size_t k = std::min(b, c);
    r.statistic = static_cast<double>(k);
    if (n == 0) {
        return r;
    }
    // P(X <= k) for X ~ Binomial(n, 1/2), summed in log space.
    const double log_half_n = static_cast<double>(n) * std::log(0.5);
    const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
    double tail = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double log_choose = lg_n1 - std::lgamma(static_cast<double>(i) + 1.0) -
                                  std::lgamma(static_cast<double>(n - i) + 1.0);
        tail += std::exp(log_choose + log_half_n);
    }
    r.p_value = std::min(1.0, 2.0 * tail);
    r.significant_at_0_01 = r.p_value < 0.01;
    return r;
}

McNemarResult mcnemar_from_counts(std::size_t b, std::size_t c) {
    return (b + c >= 25) ? mcnemar_chi_squared(b, c) : mcnemar_exact(b, c);
}

McNemarResult mcnemar(std::span<const ClassLabel> predicted_a,
                      std::span<const ClassLabel> predicted_b,
                      std::span<const ClassLabel> gold) {
    if (predicted_a.size() != gold.size() || predicted_b.size() != gold.size()) {
        throw ContractError("mcnemar: prediction and gold lengths differ");
    }
    std::size_t b = 0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool a_ok = predicted_a[i] == gold[i];
        const bool b_ok = predicted_b[i] == gold[i];
        if (a_ok && !b_ok) {
            ++b;
        } else if (!a_ok && b_ok) {
            ++c;
        }
    }
    return mcnemar_from_counts(b, c);
}

bool ReportEntry::significant() const {
    return vs_baseline && vs_baseline->significant_at_0_01 && vs_baseline->b > vs_baseline->c;
}

std::string setting_label(std::span<const std::string> sources, std::string_view target) {
    auto initial = [](std::string_view d) {
        return d.empty() ? std::string("?") : std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(d[0]))));
    };
    std::string label;
    for (const auto &s : sources) {
        label += initial(s);
    }
    return label + "->" + initial(target);
}

namespace {

std::string join(std::span<const std::string> parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) {
            out.push_back(sep);
        }
        out += parts[i];
    }
    return out;
}

std::string cell_text(const ReportEntry &e) {
    return format_fixed(100.0 * e.eval.accuracy, 1) + (e.significant() ? "*" : "");
}

}  // namespace

std::string format_table(std::span<const ReportEntry> entries) {
    std::vector<std::string> methods;
    std::vector<std::string> settings;
    for (const auto &e : entries) {
        const std::string s = setting_label(e.sources, e.target);
        if (std::find(methods.begin(), methods.end(), e.method) == methods.end()) {
            methods.push_back(e.method);
        }
        if (std::find(settings.begin(), settings.end(), s) == settings.end()) {
            settings.push_back(s);
        }
    }

    std::vector<std::vector<std::string>> grid(methods.size(), std::vector<std::string>(settings.size(), "-"));
    for (const auto &e : entries) {
        const auto r = std::find(methods.begin(), methods.end(), e.method) - methods.begin();
        const auto c = std::find(settings.begin(), settings.end(), setting_label(e.sources, e.target)) - settings.begin();
        grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = cell_text(e);
    }

    std::size_t first_width = std::string_view("Method").size();
    for (const auto &m : methods) {
        first_width = std::max(first_width, m.size());
    }
    std::vector<std::size_t> widths(settings.size());
    for (std::size_t c = 0; c < settings.size(); ++c) {
        widths[c] = settings[c].size();
        for (const auto &row : grid) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }

    std::ostringstream out;
    auto pad = [&](const std::string &s, std::size_t w) { out << s << std::string(w - s.size(), ' '); };
    pad("Method", first_width);
    for (std::size_t c = 0; c < settings.size(); ++c) {
        out << "  ";
        pad(settings[c], widths[c]);
    }
    out << '\n';
    for (std::size_t r = 0; r < methods.size(); ++r) {
        pad(methods[r], first_width);
        for (std::size_t c = 0; c < settings.size(); ++c) {
            out << "  ";
            pad(grid[r][c], widths[c]);
        }
        out << '\n';
    }
    return out.str();
}

std::string format_tsv(std::span<const ReportEntry> entries) {
    std::ostringstream out;
    out << "method\tsource_domains\ttarget_domain\taccuracy_percent\tsignificant_vs_baseline\tmcnemar_statistic\t"
           "mcnemar_method\n";
    for (const auto &e : entries) {
        out << e.method << '\t' << join(e.sources, ',') << '\t' << e.target << '\t'
            << format_fixed(100.0 * e.eval.accuracy, 1) << '\t' << (e.significant() ? 1 : 0) << '\t';
        if (e.vs_baseline) {
            out << format_double(e.vs_baseline->statistic) << '\t' << to_string(e.vs_baseline->method);
        } else {
            out << "\tnone";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace tsk
