#include "freestein/word.hpp"

#include <algorithm>

#include "freestein/coeff.hpp"

namespace freestein {

std::size_t Word::min_nvars() const {
  if (letters_.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(letters_.begin(), letters_.end())) + 1;
}

Word Word::rotated(std::size_t shift) const {
  if (letters_.empty()) return *this;
  std::vector<Letter> out(letters_);
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(shift % out.size()), out.end());
  return Word(std::move(out));
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string out;
  for (std::size_t k = 0; k < letters_.size(); ++k) {
    if (k) out += ' ';
    out += 't';
    out += std::to_string(static_cast<int>(letters_[k]) + 1);
  }
  return out;
}

std::vector<Word> words_of_length(std::size_t nvars, std::size_t length) {
  std::vector<Word> out;
  std::vector<Letter> cur(length, 0);
  while (true) {
    out.emplace_back(cur);
    std::size_t k = length;
    while (k > 0) {
      --k;
      if (cur[k] + 1u < nvars) {
        ++cur[k];
        std::fill(cur.begin() + static_cast<std::ptrdiff_t>(k) + 1, cur.end(), 0);
        break;
      }
      if (k == 0) return out;
    }
    if (length == 0) return out;
  }
}

std::vector<Word> words_up_to(std::size_t nvars, std::size_t max_length) {
  std::vector<Word> out;
  for (std::size_t len = 0; len <= max_length; ++len) {
    auto layer = words_of_length(nvars, len);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

std::string Coeff::to_string() const {
  if (sgn(im_) == 0) return re_.get_str();
  if (sgn(re_) == 0) return im_.get_str() + "i";
  return "(" + re_.get_str() + (sgn(im_) > 0 ? "+" : "") + im_.get_str() + "i)";
}

}  // namespace freestein
