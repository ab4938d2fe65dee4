#pragma once

// Words in free groups.  Generator k (0-based) is the letter k+1, its inverse
// -(k+1).  Generators are named a1, b1, a2, b2, ... in that order.

#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chyp {

using Letter = int;
using Word = std::vector<Letter>;

inline Letter gen_letter(int index) { return index + 1; }
inline int letter_index(Letter l) { return std::abs(l) - 1; }
inline Letter inverse_letter(Letter l) { return -l; }

inline Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter l : w) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

inline Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (Letter& l : out) l = -l;
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// Free reduction followed by stripping inverse letter pairs from the two
/// ends; the result is conjugate to w.
inline Word cyclic_reduce(const Word& w) {
  const Word r = free_reduce(w);
  size_t i = 0, j = r.size();
  while (j - i >= 2 && r[i] == -r[j - 1]) {
    ++i;
    --j;
  }
  return Word(r.begin() + static_cast<std::ptrdiff_t>(i), r.begin() + static_cast<std::ptrdiff_t>(j));
}

inline Word power(const Word& w, int k) {
  const Word base = k >= 0 ? w : inverse(w);
  Word out;
  for (int i = 0; i < std::abs(k); ++i) out.insert(out.end(), base.begin(), base.end());
  return free_reduce(out);
}

/// [a_i, b_i] [a_{i+1}, b_{i+1}] ... for `count` handles starting at handle `first`.
inline Word commutator_product(int first, int count) {
  Word w;
  for (int h = first; h < first + count; ++h) {
    const Letter a = gen_letter(2 * h), b = gen_letter(2 * h + 1);
    w.insert(w.end(), {a, b, -a, -b});
  }
  return w;
}

inline std::string generator_name(int index) {
  return std::string(index % 2 == 0 ? "a" : "b") + std::to_string(index / 2 + 1);
}

inline std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (Letter l : w) {
    if (!s.empty()) s += ' ';
    s += generator_name(letter_index(l));
    if (l < 0) s += "^-1";
  }
  return s;
}

/// Parses whitespace-separated tokens such as "a1 b1^-1".  Accepts "^-1" and
/// "^1" exponents only; unknown generators are an error.
inline Word parse_word(const std::string& text, int num_generators) {
  std::istringstream in(text);
  std::string tok;
  Word w;
  while (in >> tok) {
    int sign = 1;
    std::string base = tok;
    if (const auto caret = tok.find('^'); caret != std::string::npos) {
      const std::string e = tok.substr(caret + 1);
      base = tok.substr(0, caret);
      if (e == "-1")
        sign = -1;
      else if (e != "1")
        throw std::invalid_argument("unsupported exponent in token '" + tok + "'");
    }
    if (base.size() < 2 || (base[0] != 'a' && base[0] != 'b'))
      throw std::invalid_argument("unknown generator '" + base + "'");
    int handle = 0;
    try {
      size_t used = 0;
      handle = std::stoi(base.substr(1), &used);
      if (used != base.size() - 1) throw std::invalid_argument(base);
    } catch (const std::exception&) {
      throw std::invalid_argument("unknown generator '" + base + "'");
    }
    const int index = 2 * (handle - 1) + (base[0] == 'b' ? 1 : 0);
    if (handle < 1 || index >= num_generators)
      throw std::invalid_argument("unknown generator '" + base + "'");
    w.push_back(sign * gen_letter(index));
  }
  return w;
}

/// Depth-first enumeration of reduced words of length 1..max_len over
/// `num_generators` generators.  Letters are prepended, so a visit sees
/// word = l * parent; `visit(word)` returns false to prune the subtree.
template <class Visit>
void for_each_reduced_word(int num_generators, int max_len, Visit&& visit) {
  Word word;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(word.size()) >= max_len) return;
    for (int g = 0; g < num_generators; ++g) {
      for (Letter l : {gen_letter(g), -gen_letter(g)}) {
        if (!word.empty() && word.front() == -l) continue;
        word.insert(word.begin(), l);
        if (visit(static_cast<const Word&>(word))) self(self);
        word.erase(word.begin());
      }
    }
  };
  rec(rec);
}

}  // namespace chyp
