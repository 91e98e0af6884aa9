#pragma once

// Deterministic synthetic review corpora for pipeline tests.

#include "tsk/corpus.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace synthetic {

struct CorpusShape {
    std::vector<std::string> domains{ "books", "dvd", "electronics", "kitchen" };
    std::size_t per_class = 20;  // documents per (domain, label)
    std::size_t min_words = 12;
    std::size_t max_words = 30;
    std::uint32_t seed = 7;
};

inline const std::vector<std::string> &positive_words() {
    static const std::vector<std::string> w{ "great", "excellent", "love", "wonderful", "perfect",
                                             "amazing", "recommend", "best", "happy", "enjoyed" };
    return w;
}

inline const std::vector<std::string> &negative_words() {
    static const std::vector<std::string> w{ "terrible", "awful", "waste", "boring", "broken",
                                             "disappointed", "worst", "poor", "refund", "useless" };
    return w;
}

inline std::vector<std::string> topic_words(const std::string &domain) {
    if (domain == "books") {
        return { "novel", "author", "chapter", "story", "characters", "plot", "pages", "reader" };
    }
    if (domain == "dvd") {
        return { "movie", "film", "actors", "scene", "director", "season", "episode", "disc" };
    }
    if (domain == "electronics") {
        return { "battery", "screen", "cable", "sound", "device", "charger", "speaker", "remote" };
    }
    if (domain == "kitchen") {
        return { "blender", "pan", "knife", "coffee", "oven", "kettle", "dishwasher", "toaster" };
    }
    return { "thing", "item", "product", "stuff" };
}

inline const std::vector<std::string> &filler_words() {
    static const std::vector<std::string> w{ "the", "a", "this", "it", "was", "and", "i", "my",
                                             "with", "for", "really", "very", "but", "after", "one" };
    return w;
}

inline std::string review_text(std::mt19937 &rng, const std::string &domain, bool positive, std::size_t words) {
    const auto topics = topic_words(domain);
    const auto &sentiment = positive ? positive_words() : negative_words();
    const auto &other = positive ? negative_words() : positive_words();
    std::string text;
    for (std::size_t i = 0; i < words; ++i) {
        const auto roll = rng() % 100;
        const std::vector<std::string> *pool = &filler_words();
        if (roll < 22) {
            pool = &sentiment;
        } else if (roll < 26) {
            pool = &other;
        } else if (roll < 50) {
            pool = &topics;
        }
        if (!text.empty()) {
            text += ' ';
        }
        text += (*pool)[rng() % pool->size()];
    }
    text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    return text + ".";
}

inline std::vector<tsk::Document> make_corpus(const CorpusShape &shape = {}) {
    std::mt19937 rng(shape.seed);
    std::vector<tsk::Document> docs;
    for (const auto &domain : shape.domains) {
        for (int label = 1; label <= 2; ++label) {
            for (std::size_t i = 0; i < shape.per_class; ++i) {
                const std::size_t words = shape.min_words + rng() % (shape.max_words - shape.min_words + 1);
                tsk::Document d;
                d.domain = domain;
                d.id = domain + "/" + (label == 2 ? "pos" : "neg") + std::to_string(1000 + i);
                d.label = label;
                d.text = review_text(rng, domain, label == 2, words);
                docs.push_back(std::move(d));
            }
        }
    }
    return docs;
}

// The same reviews laid out like the dataset's pseudo-XML files.
inline std::string review_file(const std::vector<tsk::Document> &docs, const std::string &domain, int label) {
    std::string out;
    for (const auto &d : docs) {
        if (d.domain != domain || d.label != label) {
            continue;
        }
        out += "<review>\n<unique_id>\n" + d.id.substr(d.id.find('/') + 1) + "\n</unique_id>\n";
        out += "<product_name>\nSomething &amp; more\n</product_name>\n";
        out += std::string("<rating>\n") + (label == 2 ? "5.0" : "1.0") + "\n</rating>\n";
        out += "<title>\nA title\n</title>\n";
        out += "<review_text>\n" + d.text + "\n</review_text>\n</review>\n";
    }
    return out;
}

}  // namespace synthetic
