#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbitrace/chains.hpp"
#include "orbitrace/model.hpp"
#include "orbitrace/scalar_k.hpp"
#include "orbitrace/weyl.hpp"

// Expression parser for scalars and observables, plus the JSON loaders
// used by the command-line driver.
//
// Grammar:
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ['^' ['-'] integer]
//   atom   := integer ['/' integer] | 'h' | 'u' | name | '(' expr ')'
//
// In scalar context, names are only root-of-unity literals: z{K} or
// zeta{K} with K dividing the model order N, embedded as the (N/K)-th
// power of the primitive N-th root.  In observable context z{i} and y{i}
// are coordinates, zeta{K} is the root literal, and u is rejected.

namespace orb {

enum class ParseCtx { scalar, observable };

namespace detail {

struct Lexer {
  std::string src;
  size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace((unsigned char)src[pos])) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= src.size();
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }
  void expect(char c) {
    if (!eat(c))
      throw error("expected '" + std::string(1, c) + "' at position " +
                  std::to_string(pos) + " in: " + src);
  }
  long long integer() {
    skip_ws();
    size_t start = pos;
    while (pos < src.size() && std::isdigit((unsigned char)src[pos])) ++pos;
    if (pos == start)
      throw error("expected a number at position " + std::to_string(pos) +
                  " in: " + src);
    return std::stoll(src.substr(start, pos - start));
  }
  // name = letters followed by optional digits, e.g. y1, zeta12, h, u
  std::optional<std::pair<std::string, int>> name() {
    skip_ws();
    size_t start = pos;
    while (pos < src.size() && std::isalpha((unsigned char)src[pos])) ++pos;
    if (pos == start) return std::nullopt;
    std::string word = src.substr(start, pos - start);
    size_t dstart = pos;
    while (pos < src.size() && std::isdigit((unsigned char)src[pos])) ++pos;
    int num = -1;
    if (pos > dstart) num = (int)std::stoll(src.substr(dstart, pos - dstart));
    return std::make_pair(word, num);
  }
};

// Every parsed value fits in one carrier: a Weyl element (coordinates and
// hbar) with an extra u-exponent bucket.
struct PVal {
  std::map<int, WeylElement> by_u;  // u-exponent -> element

  static PVal from(int u, WeylElement w) {
    PVal v;
    v.by_u[u] = std::move(w);
    return v;
  }
};

struct Parser {
  Lexer lex;
  const Model& m;
  ParseCtx ctx;

  Parser(std::string s, const Model& mm, ParseCtx c)
      : lex{std::move(s)}, m(mm), ctx(c) {}

  PVal add(const PVal& a, const PVal& b) {
    PVal out = a;
    for (const auto& [u, w] : b.by_u) {
      auto it = out.by_u.find(u);
      if (it == out.by_u.end())
        out.by_u[u] = w;
      else
        it->second = it->second + w;
    }
    return out;
  }
  PVal neg(const PVal& a) {
    PVal out;
    for (const auto& [u, w] : a.by_u) out.by_u[u] = -w;
    return out;
  }
  PVal mul(const PVal& a, const PVal& b) {
    PVal out;
    for (const auto& [ua, wa] : a.by_u)
      for (const auto& [ub, wb] : b.by_u) {
        WeylElement p = mul_plain(wa, wb);
        auto it = out.by_u.find(ua + ub);
        if (it == out.by_u.end())
          out.by_u[ua + ub] = p;
        else
          it->second = it->second + p;
      }
    return out;
  }

  CycloScalar root_literal(const std::string& word, int K) {
    if (K <= 0)
      throw error("root-of-unity literal needs an order: " + word);
    if (m.N % K != 0)
      throw error("root order " + std::to_string(K) +
                  " does not divide the model order " + std::to_string(m.N));
    return CycloScalar::zeta(m.N, m.N / K);
  }

  // Coordinates carry their global symplectic index; the letter must match
  // the block the index falls in (y on the fixed block, z elsewhere).
  int coord_index(const std::string& word, int num) {
    if (num < 1 || num > m.nvars())
      throw error("coordinate " + word + std::to_string(num) +
                  " is out of range for this model");
    bool fixed = num <= 2 * m.k;
    if (fixed != (word == "y"))
      throw error("coordinate " + word + std::to_string(num) +
                  " has the wrong letter for its block; expected " +
                  m.var_name(num - 1));
    return num - 1;
  }

  PVal atom() {
    char c = lex.peek();
    if (std::isdigit((unsigned char)c)) {
      long long p = lex.integer();
      Rat q(p);
      if (lex.eat('/')) {
        long long den = lex.integer();
        if (den == 0) throw error("division by zero in: " + lex.src);
        q = Rat(p, den);
      }
      return PVal::from(0, WeylElement::scalar(m, HbarSeries::term(CycloScalar(q, m.N), 0)));
    }
    if (c == '(') {
      lex.expect('(');
      PVal v = expr();
      lex.expect(')');
      return v;
    }
    auto nm = lex.name();
    if (!nm) throw error("unexpected character at position " +
                         std::to_string(lex.pos) + " in: " + lex.src);
    auto [word, num] = *nm;
    if (word == "O" && num < 0) {
      // truncation marker: O(h^T) is an unknown tail starting at order T
      lex.expect('(');
      auto inner = lex.name();
      if (!inner || inner->first != "h" || inner->second >= 0)
        throw error("expected O(h^T) in: " + lex.src);
      int T = 1;
      if (lex.eat('^')) T = (int)lex.integer();
      lex.expect(')');
      return PVal::from(
          0, WeylElement::scalar(m, HbarSeries(m.N, T - 1)));
    }
    if (word == "h" && num < 0)
      return PVal::from(0, WeylElement::one(m).hbar_shifted(1));
    if (word == "u" && num < 0) {
      if (ctx == ParseCtx::observable)
        throw error("u does not appear in observables");
      return PVal::from(1, WeylElement::one(m));
    }
    if (word == "zeta")
      return PVal::from(0, WeylElement::scalar(m, HbarSeries::term(root_literal(word, num), 0)));
    if (word == "z" && ctx == ParseCtx::scalar)
      return PVal::from(0, WeylElement::scalar(m, HbarSeries::term(root_literal(word, num), 0)));
    if (word == "y" || word == "z") {
      if (ctx == ParseCtx::scalar)
        throw error("coordinates are not allowed in scalar context: " + word +
                    std::to_string(num));
      return PVal::from(0, WeylElement::coord(m, coord_index(word, num)));
    }
    throw error("unknown name '" + word + "' in: " + lex.src);
  }

  PVal factor() {
    // Root literals, h, and u admit negative exponents.  Classify the
    // upcoming atom before consuming it so those can be built directly.
    enum { other, hbar, uvar, root } kind = other;
    int root_order = 0;
    {
      size_t save = lex.pos;
      char c = lex.peek();
      if (!std::isdigit((unsigned char)c) && c != '(') {
        if (auto nm = lex.name()) {
          auto [word, num] = *nm;
          if (word == "h" && num < 0)
            kind = hbar;
          else if (word == "u" && num < 0)
            kind = uvar;
          else if (word == "zeta" ||
                   (word == "z" && ctx == ParseCtx::scalar)) {
            kind = root;
            root_order = num;
          }
        }
      }
      lex.pos = save;
    }

    PVal base = atom();
    if (!lex.eat('^')) return base;
    bool negexp = lex.eat('-');
    long long e = lex.integer();
    if (negexp) e = -e;

    if (kind == hbar)
      return PVal::from(0, WeylElement::one(m).hbar_shifted((int)e));
    if (kind == uvar) return PVal::from((int)e, WeylElement::one(m));
    if (kind == root) {
      CycloScalar z = root_literal("z", root_order);
      CycloScalar acc(Rat(1), m.N);
      long long steps = ((e % root_order) + root_order) % root_order;
      for (long long i = 0; i < steps; ++i) acc = acc * z;
      return PVal::from(0, WeylElement::scalar(m, HbarSeries::term(acc, 0)));
    }
    if (e < 0)
      throw error("negative exponents are only allowed on h, u, and "
                  "root-of-unity literals");
    PVal out = PVal::from(0, WeylElement::one(m));
    for (long long i = 0; i < e; ++i) out = mul(out, base);
    return out;
  }

  PVal term() {
    PVal v = factor();
    while (lex.eat('*')) v = mul(v, factor());
    return v;
  }

  PVal expr() {
    bool leading_minus = lex.eat('-');
    PVal v = term();
    if (leading_minus) v = neg(v);
    while (true) {
      if (lex.eat('+')) {
        v = add(v, term());
      } else if (lex.eat('-')) {
        v = add(v, neg(term()));
      } else {
        break;
      }
    }
    return v;
  }
};

}  // namespace detail

inline WeylElement parse_observable(const Model& m, const std::string& s) {
  detail::Parser p(s, m, ParseCtx::observable);
  detail::PVal v = p.expr();
  if (!p.lex.done())
    throw error("trailing input at position " + std::to_string(p.lex.pos) +
                " in: " + s);
  WeylElement out = WeylElement::zero(m);
  for (const auto& [u, w] : v.by_u) {
    if (w.is_zero()) continue;
    if (u != 0) throw error("u does not appear in observables");
    out = out + w;
  }
  return out;
}

inline ScalarK parse_scalar(const Model& m, const std::string& s) {
  detail::Parser p(s, m, ParseCtx::scalar);
  detail::PVal v = p.expr();
  if (!p.lex.done())
    throw error("trailing input at position " + std::to_string(p.lex.pos) +
                " in: " + s);
  ScalarK out(m.N);
  for (const auto& [u, w] : v.by_u) {
    for (const auto& [mono, h] : w.terms()) {
      if (mono_deg(mono) != 0)
        throw error("coordinates are not allowed in scalar context");
      out = out + ScalarK::from_hbar(h, u);
    }
  }
  return out.promoted(m.N);
}

// A pure root-of-unity scalar, for coefficient-twist matrix entries.
inline CycloScalar parse_root_scalar(const Model& m, const std::string& s) {
  ScalarK v = parse_scalar(m, s);
  CycloScalar out(Rat(0), m.N);
  for (const auto& [u, h] : v.coeffs()) {
    if (h.is_zero()) continue;
    if (u != 0) throw error("twist entries must be constants: " + s);
    for (const auto& [e, c] : h.coeffs()) {
      if (c.is_zero()) continue;
      if (e != 0) throw error("twist entries must be constants: " + s);
      out = out + c;
    }
  }
  return out;
}

// ---- JSON loaders -------------------------------------------------------

using json = nlohmann::json;

inline Model model_from_json(const json& j) {
  if (!j.is_object()) throw error("model file must hold a JSON object");
  auto geti = [&](const char* key) -> int {
    if (!j.contains(key) || !j[key].is_number_integer())
      throw error(std::string("model field '") + key +
                  "' must be an integer");
    return j[key].get<int>();
  };
  int n = geti("n"), k = geti("k"), r = geti("r"), N = geti("N");
  std::vector<int> eigs;
  if (j.contains("perp_eigs")) {
    if (!j["perp_eigs"].is_array())
      throw error("model field 'perp_eigs' must be an array of integers");
    for (const auto& e : j["perp_eigs"]) eigs.push_back(e.get<int>());
  }
  int htr = j.contains("hbar_trunc") ? j["hbar_trunc"].get<int>() : 6;
  int wtr = j.contains("weight_trunc") ? j["weight_trunc"].get<int>() : 8;

  CMatrix twist;
  if (j.contains("e_twist") && !j["e_twist"].is_null()) {
    const auto& t = j["e_twist"];
    if (!t.is_array()) throw error("model field 'e_twist' must be a matrix");
    Model plain(n, k, 1, N, eigs, {}, htr, wtr);
    for (const auto& row : t) {
      if (!row.is_array())
        throw error("model field 'e_twist' must be a matrix");
      std::vector<CycloScalar> out_row;
      for (const auto& cell : row)
        out_row.push_back(parse_root_scalar(plain, cell.get<std::string>()));
      twist.push_back(std::move(out_row));
    }
  }
  return Model(n, k, r, N, eigs, twist, htr, wtr);
}

inline MatrixWeyl slot_from_json(const Model& m, const json& j) {
  if (j.is_string()) {
    WeylElement w = parse_observable(m, j.get<std::string>());
    MatrixWeyl out(m, m.r);
    for (int i = 0; i < m.r; ++i) out.at(i, i) = w;
    return out;
  }
  if (!j.is_array()) throw error("a chain slot is a string or an r x r array");
  MatrixWeyl out(m, m.r);
  if ((int)j.size() != m.r)
    throw error("slot matrix must be " + std::to_string(m.r) + " x " +
                std::to_string(m.r));
  for (int i = 0; i < m.r; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || (int)row.size() != m.r)
      throw error("slot matrix must be " + std::to_string(m.r) + " x " +
                  std::to_string(m.r));
    for (int jj = 0; jj < m.r; ++jj)
      out.at(i, jj) = parse_observable(m, row[jj].get<std::string>());
  }
  return out;
}

inline Chain chain_from_json(const Model& m, const json& j) {
  Chain c;
  auto term_from = [&](const json& t) {
    ChainTerm out;
    out.coef = ScalarK::constant(Rat(1), m.N);
    if (t.contains("coef"))
      out.coef = parse_scalar(m, t["coef"].get<std::string>());
    if (!t.contains("slots") || !t["slots"].is_array() ||
        t["slots"].empty())
      throw error("each chain term needs a nonempty 'slots' array");
    for (const auto& s : t["slots"]) out.slots.push_back(slot_from_json(m, s));
    return out;
  };
  if (j.is_object() && j.contains("terms")) {
    for (const auto& t : j["terms"]) {
      ChainTerm ct = term_from(t);
      c.push(ct.coef, ct.slots);
    }
  } else if (j.is_object() && j.contains("slots")) {
    ChainTerm ct = term_from(j);
    c.push(ct.coef, ct.slots);
  } else {
    throw error("chain file needs a 'slots' array or a 'terms' array");
  }
  return c;
}

inline std::vector<MatrixWeyl> args_from_json(const Model& m, const json& j) {
  const json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("args"))
      throw error("args file needs an 'args' array");
    arr = &j["args"];
  }
  if (!arr->is_array()) throw error("args file needs an 'args' array");
  std::vector<MatrixWeyl> out;
  for (const auto& a : *arr) out.push_back(slot_from_json(m, a));
  return out;
}

}  // namespace orb
