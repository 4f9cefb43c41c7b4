#include <algorithm>
#include <set>

#include "molexp/policy/vocab.hpp"

namespace molexp::policy {

namespace {

bool single_char_token(char c) {
    switch (c) {
        case 'C': case 'N': case 'O': case 'S': case 'F':
        case 'c': case 'n': case 'o': case 's':
        case '-': case '=': case '#': case ':':
        case '(': case ')':
            return true;
        default:
            return c >= '1' && c <= '9';
    }
}

}  // namespace

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = static_cast<int>(i);
}

std::vector<std::string> Vocab::split_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '[') {
            const auto close = s.find(']', i);
            if (close == std::string_view::npos)
                throw UnknownTokenError("unterminated bracket token in: " + std::string(s));
            out.emplace_back(s.substr(i, close - i + 1));
            i = close + 1;
        } else if (i + 1 < s.size() && (s.substr(i, 2) == "Cl" || s.substr(i, 2) == "Br")) {
            out.emplace_back(s.substr(i, 2));
            i += 2;
        } else if (c == '%') {
            if (i + 2 >= s.size()) throw UnknownTokenError("bad '%' ring token in: " + std::string(s));
            out.emplace_back(s.substr(i, 3));
            i += 3;
        } else if (single_char_token(c)) {
            out.emplace_back(1, c);
            ++i;
        } else {
            throw UnknownTokenError(std::string("unknown character '") + c + "' in: " + std::string(s));
        }
    }
    return out;
}

Vocab Vocab::from_corpus(const std::vector<std::string>& corpus) {
    std::set<std::string> seen;
    for (const auto& s : corpus)
        for (auto& t : split_tokens(s)) seen.insert(std::move(t));
    // Structural tokens are always present so randomized rewrites of corpus
    // molecules stay encodable even when the corpus never used them.
    for (const char* t : {"(", ")", "-", "=", "#", "1", "2", "3", "4", "5", "6", "7", "8", "9"})
        seen.insert(t);
    std::vector<std::string> table{"<pad>", "<bos>", "<eos>"};
    table.insert(table.end(), seen.begin(), seen.end());
    return Vocab(std::move(table));
}

int Vocab::id_of(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) throw UnknownTokenError("token not in vocabulary: " + token);
    return it->second;
}

std::vector<int> Vocab::encode(std::string_view s) const {
    std::vector<int> ids;
    for (const auto& t : split_tokens(s)) ids.push_back(id_of(t));
    return ids;
}

std::string Vocab::decode(std::span<const int> ids) const {
    std::string out;
    for (int id : ids) {
        if (id == kEos) break;
        if (id == kPad || id == kBos) {
            out += '?';
            continue;
        }
        out += tokens_[id];
    }
    return out;
}

}  // namespace molexp::policy
