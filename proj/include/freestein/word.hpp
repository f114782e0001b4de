#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace freestein {

/// Generator index, 0-based. Words support up to 255 generators.
using Letter = std::uint8_t;

/// A monomial t_{i1} t_{i2} ... t_{im} in self-adjoint generators. The empty word is the unit.
///
/// Words are ordered graded-lexicographically: shorter words first, ties broken lexicographically.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> letters) : letters_(letters) {}
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word unit() { return {}; }
  static Word letter(std::size_t i) { return Word{static_cast<Letter>(i)}; }

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t k) const { return letters_[k]; }
  std::span<const Letter> letters() const { return letters_; }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }

  /// Largest letter + 1, or 0 for the unit.
  std::size_t min_nvars() const;

  Word reversed() const { return Word(std::vector<Letter>(letters_.rbegin(), letters_.rend())); }
  /// Letters [from, to).
  Word slice(std::size_t from, std::size_t to) const {
    return Word(std::vector<Letter>(letters_.begin() + static_cast<std::ptrdiff_t>(from),
                                    letters_.begin() + static_cast<std::ptrdiff_t>(to)));
  }
  Word rotated(std::size_t shift) const;

  Word& operator*=(const Word& other) {
    letters_.insert(letters_.end(), other.letters_.begin(), other.letters_.end());
    return *this;
  }
  friend Word operator*(Word a, const Word& b) { return a *= b; }

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return a.letters_ <=> b.letters_;
  }

  /// "t1 t2 t1" (1-based labels), or "1" for the unit.
  std::string to_string() const;

 private:
  std::vector<Letter> letters_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::size_t h = 1469598103934665603ULL ^ w.size();
    for (Letter l : w) h = (h ^ l) * 1099511628211ULL;
    return h;
  }
};

/// All words of length exactly `length` over `nvars` letters, lexicographic order.
std::vector<Word> words_of_length(std::size_t nvars, std::size_t length);
/// All words of length <= `max_length`, graded-lex order (unit first).
std::vector<Word> words_up_to(std::size_t nvars, std::size_t max_length);

}  // namespace freestein
