#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace nct {

// A noncommutative monomial in the variables X1..Xd, stored as the sequence
// of 1-based letter indices. The empty word is the unit.
struct Word {
    std::vector<int> letters;

    Word() = default;
    Word(std::initializer_list<int> ls) : letters(ls) {}
    explicit Word(std::vector<int> ls) : letters(std::move(ls)) {}

    std::size_t size() const { return letters.size(); }
    bool empty() const { return letters.empty(); }
    int max_letter() const {
        int m = 0;
        for (int l : letters)
            if (l > m) m = l;
        return m;
    }

    Word concat(const Word& other) const {
        Word w(*this);
        w.letters.insert(w.letters.end(), other.letters.begin(), other.letters.end());
        return w;
    }
    Word reversed() const {
        Word w(*this);
        for (std::size_t i = 0, j = w.letters.size(); i + 1 < j; ++i, --j)
            std::swap(w.letters[i], w.letters[j - 1]);
        return w;
    }
    Word subword(std::size_t begin, std::size_t end) const {
        return Word(std::vector<int>(letters.begin() + begin, letters.begin() + end));
    }

    auto operator<=>(const Word&) const = default;
};

// Lexicographically minimal rotation; rotations of the same word map to the
// same result. Used as the canonical representative of a trace class.
Word cyclic_normalize(const Word& w);

// Power Xi^k as a word.
inline Word word_power(int letter, int k) {
    return Word(std::vector<int>(static_cast<std::size_t>(k), letter));
}

}  // namespace nct
