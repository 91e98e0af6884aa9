#include "tsk/ngram.hpp"

#include "tsk/error.hpp"
#include "tsk/parallel.hpp"
#include "tsk/unicode.hpp"

#include <algorithm>
#include <unordered_map>

namespace tsk {

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::presence:
            return "presence";
        case KernelFamily::intersection:
            return "intersection";
        case KernelFamily::spectrum:
            return "spectrum";
    }
    return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
    if (name == "presence" || name == "k01" || name == "0/1") {
        return KernelFamily::presence;
    }
    if (name == "intersection" || name == "cap") {
        return KernelFamily::intersection;
    }
    if (name == "spectrum") {
        return KernelFamily::spectrum;
    }
    throw ContractError("unknown kernel family: " + std::string(name));
}

void KernelConfig::validate() const {
    if (p_min < 1 || p_max < p_min) {
        throw ContractError("invalid n-gram range [" + std::to_string(p_min) + ", " + std::to_string(p_max) + "]");
    }
}

std::u32string preprocess(std::string_view utf8, bool lowercase) {
    std::u32string text = decode_utf8(utf8).text;
    if (lowercase) {
        for (char32_t &c : text) {
            c = to_lower(c);
        }
    }
    return text;
}

NGramProfile NGramProfile::extract(std::u32string_view text, int p) {
    if (p < 1) {
        throw ContractError("n-gram order must be >= 1");
    }
    NGramProfile profile;
    profile.p_ = p;
    const auto len = static_cast<std::size_t>(p);
    if (text.size() < len) {
        return profile;
    }

    std::vector<std::u32string_view> grams;
    grams.reserve(text.size() - len + 1);
    for (std::size_t i = 0; i + len <= text.size(); ++i) {
        grams.push_back(text.substr(i, len));
    }
    std::sort(grams.begin(), grams.end());

    for (std::size_t i = 0; i < grams.size();) {
        std::size_t j = i + 1;
        while (j < grams.size() && grams[j] == grams[i]) {
            ++j;
        }
        profile.entries_.push_back({ std::u32string(grams[i]), static_cast<std::uint32_t>(j - i) });
        i = j;
    }
    profile.total_ = grams.size();
    return profile;
}

std::uint32_t NGramProfile::count(std::u32string_view gram) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), gram,
                               [](const Entry &e, std::u32string_view g) { return e.gram < g; });
    return (it != entries_.end() && it->gram == gram) ? it->count : 0;
}

namespace {

template <KernelFamily F>
constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    if constexpr (F == KernelFamily::presence) {
        return 1;
    } else if constexpr (F == KernelFamily::intersection) {
        return std::min(a, b);
    } else {
        return a * b;
    }
}

template <KernelFamily F, typename Item, typename Less, typename Count>
std::uint64_t merge_kernel(std::span<const Item> a, std::span<const Item> b, Less less, Count count) {
    std::uint64_t sum = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (less(*ia, *ib)) {
            ++ia;
        } else if (less(*ib, *ia)) {
            ++ib;
        } else {
            sum += combine<F>(count(*ia), count(*ib));
            ++ia;
            ++ib;
        }
    }
    return sum;
}

template <typename Item, typename Less, typename Count>
double dispatch(std::span<const Item> a, std::span<const Item> b, KernelFamily family, Less less, Count count) {
    switch (family) {
        case KernelFamily::presence:
            return static_cast<double>(merge_kernel<KernelFamily::presence>(a, b, less, count));
        case KernelFamily::intersection:
            return static_cast<double>(merge_kernel<KernelFamily::intersection>(a, b, less, count));
        case KernelFamily::spectrum:
            return static_cast<double>(merge_kernel<KernelFamily::spectrum>(a, b, less, count));
    }
    throw ContractError("unknown kernel family");
}

}  // namespace

double kernel_value(const NGramProfile &a, const NGramProfile &b, KernelFamily family) {
    if (a.order() != b.order()) {
        throw ContractError("kernel_value: profiles have different n-gram orders (" + std::to_string(a.order()) +
                            " vs " + std::to_string(b.order()) + ")");
    }
    using Entry = NGramProfile::Entry;
    return dispatch<Entry>(
        a.entries(), b.entries(), family, [](const Entry &x, const Entry &y) { return x.gram < y.gram; },
        [](const Entry &e) { return std::uint64_t{ e.count }; });
}

double blended_kernel(std::string_view x, std::string_view y, const KernelConfig &cfg) {
    cfg.validate();
    const std::u32string tx = preprocess(x, cfg.lowercase);
    const std::u32string ty = preprocess(y, cfg.lowercase);
    double sum = 0.0;
    for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
        sum += kernel_value(NGramProfile::extract(tx, p), NGramProfile::extract(ty, p), cfg.family);
    }
    return sum;
}

double sparse_kernel(std::span<const FeatureTable::Feature> a,
                     std::span<const FeatureTable::Feature> b,
                     KernelFamily family) {
    using Feature = FeatureTable::Feature;
    return dispatch<Feature>(
        a, b, family, [](const Feature &x, const Feature &y) { return x.id < y.id; },
        [](const Feature &f) { return std::uint64_t{ f.count }; });
}

FeatureTable FeatureTable::build(std::span<const std::string> texts, const KernelConfig &cfg, unsigned threads) {
    cfg.validate();
    const std::size_t n = texts.size();

    std::vector<std::u32string> decoded(n);
    parallel_chunks(n, 16, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            decoded[i] = preprocess(texts[i], cfg.lowercase);
        }
    });

    // Ids are handed out in first-appearance order over (document, p, offset),
    // which keeps the table identical for identical input.
    std::unordered_map<std::u32string_view, std::uint32_t> vocabulary;
    std::vector<std::vector<std::uint32_t>> occurrences(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::u32string_view text = decoded[i];
        auto &ids = occurrences[i];
        for (int p = cfg.p_min; p <= cfg.p_max; ++p) {
            const auto len = static_cast<std::size_t>(p);
            for (std::size_t k = 0; k + len <= text.size(); ++k) {
                auto [it, inserted] =
                    vocabulary.try_emplace(text.substr(k, len), static_cast<std::uint32_t>(vocabulary.size()));
                ids.push_back(it->second);
            }
        }
    }

    FeatureTable table;
    table.vocabulary_ = vocabulary.size();
    table.rows_.resize(n);
    parallel_chunks(n, 16, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto &ids = occurrences[i];
            std::sort(ids.begin(), ids.end());
            auto &row = table.rows_[i];
            for (std::size_t k = 0; k < ids.size();) {
                std::size_t l = k + 1;
                while (l < ids.size() && ids[l] == ids[k]) {
                    ++l;
                }
                row.push_back({ ids[k], static_cast<std::uint32_t>(l - k) });
                k = l;
            }
            std::vector<std::uint32_t>().swap(ids);
        }
    });
    return table;
}

double FeatureTable::kernel(std::size_t i, std::size_t j, KernelFamily family) const {
    return sparse_kernel(row(i), row(j), family);
}

}  // namespace tsk
