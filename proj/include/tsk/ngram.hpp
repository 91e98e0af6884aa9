#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsk {

enum class KernelFamily : std::uint8_t {
    presence,      // number of shared distinct n-grams
    intersection,  // sum of min(count_x, count_y)
    spectrum,      // sum of count_x * count_y
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

struct KernelConfig {
    KernelFamily family = KernelFamily::presence;
    int p_min = 5;
    int p_max = 8;
    bool lowercase = true;

    // Throws ContractError unless 1 <= p_min <= p_max.
    void validate() const;
};

// Decode UTF-8 to scalar values, lowercasing when asked. Whitespace and
// punctuation are kept as-is.
std::u32string preprocess(std::string_view utf8, bool lowercase);

/// Occurrence counts of every contiguous length-p substring of one text.
class NGramProfile {
  public:
    struct Entry {
        std::u32string gram;
        std::uint32_t count;
    };

    NGramProfile() = default;

    // Texts shorter than p give an empty profile. Throws ContractError if p < 1.
    static NGramProfile extract(std::u32string_view text, int p);

    [[nodiscard]] int order() const noexcept { return p_; }
    [[nodiscard]] std::uint64_t total() const noexcept { return total_; }
    [[nodiscard]] std::size_t distinct() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

    // Sorted by gram.
    [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }

    [[nodiscard]] std::uint32_t count(std::u32string_view gram) const;

  private:
    int p_ = 1;
    std::uint64_t total_ = 0;
    std::vector<Entry> entries_;
};

// Throws ContractError when the two profiles have different n-gram orders.
double kernel_value(const NGramProfile &a, const NGramProfile &b, KernelFamily family);

// Sum of kernel_value over p = p_min..p_max on texts preprocessed per cfg.
double blended_kernel(std::string_view x, std::string_view y, const KernelConfig &cfg);

/// Interned n-gram features for a fixed collection of texts, covering every
/// order in the config's range at once. N-grams of different lengths never
/// share an id, so a single sparse dot product over a row pair gives the
/// blended kernel directly.
class FeatureTable {
  public:
    struct Feature {
        std::uint32_t id;
        std::uint32_t count;
    };

    static FeatureTable build(std::span<const std::string> texts, const KernelConfig &cfg, unsigned threads = 1);

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] std::size_t vocabulary_size() const noexcept { return vocabulary_; }

    // Sorted by id.
    [[nodiscard]] std::span<const Feature> row(std::size_t i) const { return rows_.at(i); }

    [[nodiscard]] double kernel(std::size_t i, std::size_t j, KernelFamily family) const;

  private:
    std::vector<std::vector<Feature>> rows_;
    std::size_t vocabulary_ = 0;
};

// Sparse kernel between two id-sorted feature rows.
double sparse_kernel(std::span<const FeatureTable::Feature> a,
                     std::span<const FeatureTable::Feature> b,
                     KernelFamily family);

}  // namespace tsk
