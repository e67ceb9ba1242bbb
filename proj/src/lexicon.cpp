#include "mindle/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace mindle {

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
        tokens.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return tokens;
}

bool parse_integer(std::string_view s) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<double> parse_double(std::string_view s) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw std::domain_error("cosine: undefined for a zero-norm vector");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double score_from_cosine(double cosine, bool same_concept) {
    if (same_concept) return 100.0;
    const double scaled = 100.0 * std::clamp(cosine, 0.0, 1.0);
    // Distinct concepts with parallel vectors must not register as a hit.
    return std::min(scaled, std::nextafter(100.0, 0.0));
}

Lexicon Lexicon::from_entries(std::vector<std::pair<std::string, std::vector<double>>> entries) {
    Lexicon lex;
    for (auto& [word, vec] : entries) {
        std::string key = to_lower(word);
        if (lex.dim_ == 0) {
            if (vec.size() < 2) throw std::invalid_argument("embedding dimension must be at least 2");
            lex.dim_ = vec.size();
        } else if (vec.size() != lex.dim_) {
            throw std::invalid_argument("inconsistent dimension for '" + key + "'");
        }
        const double n2 = squared_norm(vec);
        if (n2 == 0.0) throw std::invalid_argument("zero vector for '" + key + "'");
        if (lex.index_.contains(key)) throw std::invalid_argument("duplicate word '" + key + "'");
        lex.index_.emplace(key, static_cast<std::uint32_t>(lex.words_.size()));
        lex.words_.push_back(std::move(key));
        lex.data_.insert(lex.data_.end(), vec.begin(), vec.end());
        lex.norms_.push_back(std::sqrt(n2));
    }
    if (lex.words_.empty()) throw EmptyLexiconError("lexicon has no entries");
    return lex;
}

std::span<const double> Lexicon::vector(ConceptId c) const {
    if (!contains(c)) throw std::out_of_range("concept id out of range");
    return {data_.data() + static_cast<std::size_t>(c.index) * dim_, dim_};
}

std::optional<ConceptId> Lexicon::lookup(std::string_view word) const {
    auto it = index_.find(to_lower(word));
    if (it == index_.end()) return std::nullopt;
    return ConceptId{it->second};
}

double Lexicon::similarity(ConceptId a, ConceptId b) const {
    const auto va = vector(a);
    const auto vb = vector(b);
    double dot = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) dot += va[i] * vb[i];
    return std::clamp(dot / (norms_[a.index] * norms_[b.index]), -1.0, 1.0);
}

double Lexicon::similarity_to(std::span<const double> query, ConceptId c) const {
    return cosine(query, vector(c));
}

Score Lexicon::score(ConceptId guess, ConceptId target) const {
    return Score(score_from_cosine(similarity(guess, target), guess == target));
}

std::vector<std::pair<ConceptId, double>> Lexicon::ranked_(
    ConceptId c, std::size_t k, std::span<const ConceptId> exclude, bool descending) const {
    if (!contains(c)) throw std::out_of_range("concept id out of range");
    std::vector<bool> skip(size(), false);
    skip[c.index] = true;
    for (ConceptId e : exclude) {
        if (contains(e)) skip[e.index] = true;
    }
    std::vector<std::pair<ConceptId, double>> scored;
    scored.reserve(size());
    for (std::uint32_t i = 0; i < size(); ++i) {
        if (skip[i]) continue;
        scored.emplace_back(ConceptId{i}, similarity(c, ConceptId{i}));
    }
    // Cosines equal up to accumulated rounding compare as ties.
    auto key = [](double cos) { return std::llround(cos * 1e12); };
    auto before = [descending, key](const auto& x, const auto& y) {
        const auto kx = key(x.second);
        const auto ky = key(y.second);
        if (kx != ky) return descending ? kx > ky : kx < ky;
        return x.first < y.first;
    };
    const std::size_t n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), before);
    scored.resize(n);
    return scored;
}

std::vector<std::pair<ConceptId, double>> Lexicon::top_similar(
    ConceptId c, std::size_t k, std::span<const ConceptId> exclude) const {
    return ranked_(c, k, exclude, true);
}

std::vector<std::pair<ConceptId, double>> Lexicon::least_similar(
    ConceptId c, std::size_t k, std::span<const ConceptId> exclude) const {
    return ranked_(c, k, exclude, false);
}

Lexicon load_lexicon(std::istream& source, std::size_t limit) {
    if (limit == 0) throw std::invalid_argument("vocabulary limit must be at least 1");

    std::vector<std::pair<std::string, std::vector<double>>> entries;
    std::unordered_map<std::string, bool> seen;
    std::size_t dim = 0;
    std::size_t line_no = 0;
    bool first_content_line = true;
    std::string line;

    while (entries.size() < limit && std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = split_tokens(line);
        if (tokens.empty()) continue;

        if (first_content_line) {
            first_content_line = false;
            if (tokens.size() == 2 && parse_integer(tokens[0]) && parse_integer(tokens[1])) continue;
        }

        const std::size_t d = tokens.size() - 1;
        if (d < 2) throw ParseError(line_no, "expected a word followed by at least 2 components");
        if (dim == 0) {
            dim = d;
        } else if (d != dim) {
            throw ParseError(line_no, "expected " + std::to_string(dim) + " components, found " + std::to_string(d));
        }

        std::vector<double> vec;
        vec.reserve(d);
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            auto value = parse_double(tokens[i]);
            if (!value) throw ParseError(line_no, "non-numeric component '" + std::string(tokens[i]) + "'");
            vec.push_back(*value);
        }

        std::string word = to_lower(tokens[0]);
        if (seen.contains(word)) continue;
        if (squared_norm(vec) == 0.0) continue;
        seen.emplace(word, true);
        entries.emplace_back(std::move(word), std::move(vec));
    }

    if (entries.empty()) throw EmptyLexiconError("embedding source contains no entries");
    return Lexicon::from_entries(std::move(entries));
}

Lexicon load_lexicon_file(const std::string& path, std::size_t limit) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
    return load_lexicon(in, limit);
}

}  // namespace mindle
