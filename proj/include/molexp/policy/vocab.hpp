#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace molexp::policy {

class UnknownTokenError : public std::runtime_error {
public:
    explicit UnknownTokenError(const std::string& message) : std::runtime_error(message) {}
};

// Atom-level SMILES tokenizer vocabulary. Multi-character atoms (Cl, Br) and
// whole bracket expressions are single tokens; PAD/BOS/EOS are reserved ids.
class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;

    Vocab() = default;
    explicit Vocab(std::vector<std::string> tokens);  // full table including specials

    static Vocab from_corpus(const std::vector<std::string>& corpus);

    // Longest-match split into string tokens; throws UnknownTokenError on
    // characters outside the grammar.
    static std::vector<std::string> split_tokens(std::string_view s);

    std::vector<int> encode(std::string_view s) const;
    // Maps ids back to text. EOS stops decoding; stray PAD/BOS decode to a
    // '?' so they surface as parse failures rather than vanish silently.
    std::string decode(std::span<const int> ids) const;

    int size() const { return static_cast<int>(tokens_.size()); }
    const std::string& token(int id) const { return tokens_[id]; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    int id_of(const std::string& token) const;

    bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace molexp::policy
