#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mindle {

/// Dense index of a concept in a Lexicon, in [0, size).
struct ConceptId {
    std::uint32_t index = 0;

    friend auto operator<=>(ConceptId, ConceptId) = default;
};

inline constexpr std::size_t kDefaultVocabLimit = 40000;

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyLexiconError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Game score on the 0..100 scale. 100 is reserved for hitting the target.
class Score {
public:
    constexpr Score() = default;
    constexpr explicit Score(double value) : value_(value) {}

    constexpr double value() const noexcept { return value_; }
    constexpr bool is_hit() const noexcept { return value_ == 100.0; }

    friend constexpr auto operator<=>(Score, Score) = default;

private:
    double value_ = 0.0;
};

/// Bounded vocabulary with one embedding vector per word. Immutable once built.
class Lexicon {
public:
    /// Builds from already-parsed entries. Throws std::invalid_argument on
    /// duplicates, mismatched dimensions or all-zero vectors.
    static Lexicon from_entries(std::vector<std::pair<std::string, std::vector<double>>> entries);

    std::size_t size() const noexcept { return words_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    bool contains(ConceptId c) const noexcept { return c.index < words_.size(); }

    const std::string& word(ConceptId c) const { return words_.at(c.index); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    std::span<const double> vector(ConceptId c) const;
    double norm(ConceptId c) const { return norms_.at(c.index); }

    /// Case-folded lookup. std::nullopt means out of vocabulary.
    std::optional<ConceptId> lookup(std::string_view word) const;

    /// Raw cosine in [-1, 1].
    double similarity(ConceptId a, ConceptId b) const;
    /// Cosine between an arbitrary query vector and a concept.
    double similarity_to(std::span<const double> query, ConceptId c) const;

    Score score(ConceptId guess, ConceptId target) const;

    /// Highest-cosine neighbours of `c`, descending, ties by ascending id.
    /// Cosines within 1e-12 of each other are ties.
    /// `c` itself and anything in `exclude` are skipped.
    std::vector<std::pair<ConceptId, double>> top_similar(
        ConceptId c, std::size_t k, std::span<const ConceptId> exclude = {}) const;

    /// Lowest-cosine concepts relative to `c`, ascending, ties by ascending id.
    std::vector<std::pair<ConceptId, double>> least_similar(
        ConceptId c, std::size_t k, std::span<const ConceptId> exclude = {}) const;

private:
    std::vector<std::pair<ConceptId, double>> ranked_(
        ConceptId c, std::size_t k, std::span<const ConceptId> exclude, bool descending) const;

    std::vector<std::string> words_;
    std::vector<double> data_;  // row-major, size() * dim()
    std::vector<double> norms_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::size_t dim_ = 0;
};

/// Parses "word c1 ... cd" lines. An optional "<count> <dim>" header line is
/// skipped. Keeps the first `limit` unique entries in input order.
Lexicon load_lexicon(std::istream& source, std::size_t limit = kDefaultVocabLimit);
Lexicon load_lexicon_file(const std::string& path, std::size_t limit = kDefaultVocabLimit);

std::string to_lower(std::string_view s);

/// 100 * clamp(cos, 0, 1), with 100 reserved for identical concepts.
double score_from_cosine(double cosine, bool same_concept);

double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace mindle

template <>
struct std::hash<mindle::ConceptId> {
    std::size_t operator()(mindle::ConceptId c) const noexcept { return std::hash<std::uint32_t>{}(c.index); }
};
