#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "vcsp/errors.hpp"
#include "vcsp/instance.hpp"
#include "vcsp/operations.hpp"
#include "vcsp/solvers.hpp"

namespace vcsp {

namespace detail {

struct Token {
  std::string_view text;
  int column = 1;
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
};

// Splits into non-empty lines of whitespace-separated tokens; '#' starts a comment.
inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
      std::size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r') ++i;
      if (i > start) line.tokens.push_back(Token{raw.substr(start, i - start), static_cast<int>(start) + 1});
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

class Cursor {
 public:
  Cursor(std::string source, std::string_view text) : source_(std::move(source)), lines_(tokenize(text)) {}

  bool done() const { return next_ >= lines_.size(); }
  const Line& peek() const { return lines_[next_]; }
  const Line& take() { return lines_[next_++]; }
  int last_line() const { return lines_.empty() ? 1 : lines_.back().number; }

  [[noreturn]] void fail(const Line& line, const Token& tok, const std::string& what) const {
    throw ParseError(source_, line.number, tok.column, what);
  }
  [[noreturn]] void fail(const Line& line, const std::string& what) const {
    throw ParseError(source_, line.number, line.tokens.empty() ? 1 : line.tokens.front().column, what);
  }
  [[noreturn]] void fail_at_end(const std::string& what) const { throw ParseError(source_, last_line(), 1, what); }

  long long integer(const Line& line, const Token& tok, long long lo, long long hi, const char* what) const {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
    if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
      fail(line, tok, std::string("expected an integer ") + what + ", got '" + std::string(tok.text) + "'");
    }
    if (v < lo || v > hi) {
      fail(line, tok, std::string(what) + " " + std::to_string(v) + " outside " + std::to_string(lo) + ".." +
                          std::to_string(hi));
    }
    return v;
  }

  void arity(const Line& line, std::size_t expected, const char* keyword) const {
    if (line.tokens.size() != expected) {
      fail(line, std::string("'") + keyword + "' line needs " + std::to_string(expected - 1) + " fields, got " +
                     std::to_string(line.tokens.size() - 1));
    }
  }

 private:
  std::string source_;
  std::vector<Line> lines_;
  std::size_t next_ = 0;
};

template <class C>
C parse_cost(const Cursor& cur, const Line& line, const Token& tok) {
  try {
    return C::parse(tok.text);
  } catch (const std::invalid_argument& e) {
    cur.fail(line, tok, std::string("bad cost: ") + e.what());
  }
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- instances ---------------------------------------------------------------------------------

template <class C>
Instance<C> parse_instance(std::string_view text, const std::string& source = "<input>",
                           std::uint64_t cap = kDefaultEnumerationCap) {
  detail::Cursor cur(source, text);
  if (cur.done()) cur.fail_at_end("empty instance file");
  const auto& head = cur.take();
  if (head.tokens[0].text != "vcsp") cur.fail(head, head.tokens[0], "expected 'vcsp <variables>'");
  cur.arity(head, 2, "vcsp");
  const int n = static_cast<int>(cur.integer(head, head.tokens[1], 1, 1'000'000, "variable count"));
  if (cur.done()) cur.fail_at_end("missing 'domains' line");
  const auto& dl = cur.take();
  if (dl.tokens[0].text != "domains") cur.fail(dl, dl.tokens[0], "expected 'domains'");
  cur.arity(dl, static_cast<std::size_t>(n) + 1, "domains");
  std::vector<int> sizes;
  for (int i = 0; i < n; ++i) {
    sizes.push_back(static_cast<int>(cur.integer(dl, dl.tokens[static_cast<std::size_t>(i) + 1], 1, kMaxDomainSize, "domain size")));
  }
  Instance<C> inst{DomainSpec(sizes)};

  while (!cur.done()) {
    const auto& tl = cur.take();
    if (tl.tokens[0].text != "term") cur.fail(tl, tl.tokens[0], "expected 'term', got '" + std::string(tl.tokens[0].text) + "'");
    if (tl.tokens.size() < 2) cur.fail(tl, "'term' line needs an arity");
    const auto m = static_cast<std::size_t>(cur.integer(tl, tl.tokens[1], 1, 64, "term arity"));
    cur.arity(tl, m + 2, "term");
    std::vector<int> scope, tsizes;
    for (std::size_t p = 0; p < m; ++p) {
      int v = static_cast<int>(cur.integer(tl, tl.tokens[p + 2], 1, n, "variable index")) - 1;
      scope.push_back(v);
      tsizes.push_back(sizes[static_cast<std::size_t>(v)]);
    }
    require_within_cap(tuple_count(tsizes), cap);
    std::optional<C> fill;
    std::vector<std::pair<Tuple, C>> entries;
    std::set<Tuple> seen;
    while (!cur.done() && cur.peek().tokens[0].text != "term") {
      const auto& el = cur.take();
      const auto& kw = el.tokens[0].text;
      if (kw == "default") {
        cur.arity(el, 2, "default");
        if (fill) cur.fail(el, "duplicate 'default' line");
        fill = detail::parse_cost<C>(cur, el, el.tokens[1]);
      } else if (kw == "entry") {
        cur.arity(el, m + 2, "entry");
        Tuple t(m);
        for (std::size_t p = 0; p < m; ++p) {
          t[p] = static_cast<Label>(cur.integer(el, el.tokens[p + 1], 0, tsizes[p] - 1, "label"));
        }
        if (!seen.insert(t).second) cur.fail(el, "duplicate entry for tuple " + tuple_to_string(t));
        entries.emplace_back(std::move(t), detail::parse_cost<C>(cur, el, el.tokens[m + 1]));
      } else {
        cur.fail(el, el.tokens[0], "expected 'default' or 'entry', got '" + std::string(kw) + "'");
      }
    }
    if (!fill) cur.fail(tl, "term has no 'default' line");
    CostTable<C> table(tsizes, *fill);
    for (auto& [t, c] : entries) table.set(t, c);
    inst.add_term(std::move(table), std::move(scope));
  }
  return inst;
}

template <class C>
Instance<C> load_instance(const std::string& path, std::uint64_t cap = kDefaultEnumerationCap) {
  return parse_instance<C>(read_file(path), path, cap);
}

// Canonical form: default is the most frequent cost (smallest on ties), entries in lexicographic order.
template <class C>
void write_instance(std::ostream& os, const Instance<C>& inst) {
  os << "vcsp " << inst.variable_count() << "\ndomains";
  for (int d : inst.domains().sizes()) os << ' ' << d;
  os << '\n';
  for (const auto& term : inst.terms()) {
    os << "term " << term.scope.size();
    for (int v : term.scope) os << ' ' << v + 1;
    os << '\n';
    std::vector<C> values(term.table.entries().begin(), term.table.entries().end());
    std::sort(values.begin(), values.end());
    C best = values.front();
    std::size_t best_count = 0;
    for (std::size_t s = 0; s < values.size();) {
      std::size_t e = s;
      while (e < values.size() && values[e] == values[s]) ++e;
      if (e - s > best_count) {
        best_count = e - s;
        best = values[s];
      }
      s = e;
    }
    os << "default " << best << '\n';
    for (std::size_t k = 0; k < term.table.size(); ++k) {
      if (term.table.at(k) == best) continue;
      os << "entry";
      for (Label a : term.table.tuple_at(k)) os << ' ' << a;
      os << ' ' << term.table.at(k) << '\n';
    }
  }
}

template <class C>
std::string instance_to_string(const Instance<C>& inst) {
  std::ostringstream os;
  write_instance(os, inst);
  return os.str();
}

// ---- operation systems -------------------------------------------------------------------------

// Parses the tables and checks shapes and label ranges. With validate set, conservativity of the pair
// and the STP/MJN contract are checked too (ValidationError with a witness).
inline OperationSystem parse_ops(std::string_view text, const DomainSpec& domains, const std::string& source = "<ops>",
                                 bool validate = true) {
  detail::Cursor cur(source, text);
  const int n = domains.variable_count();
  OperationSystem ops;
  ops.m = PairSet(domains);
  std::vector<std::optional<BinaryTable>> meet(static_cast<std::size_t>(n)), join(static_cast<std::size_t>(n));
  std::vector<std::optional<TernaryTable>> mj1(static_cast<std::size_t>(n)), mj2(static_cast<std::size_t>(n)),
      mn3(static_cast<std::size_t>(n));
  std::vector<char> m_seen(static_cast<std::size_t>(n), 0);

  auto read_rows = [&](const detail::Line& header, int d, int rows, auto&& store) {
    for (int r = 0; r < rows; ++r) {
      if (cur.done()) cur.fail(header, "table ends after " + std::to_string(r) + " of " + std::to_string(rows) + " rows");
      const auto& row = cur.take();
      if (row.tokens[0].text.find_first_not_of("0123456789") != std::string_view::npos) {
        cur.fail(row, row.tokens[0], "expected a table row, got '" + std::string(row.tokens[0].text) + "'");
      }
      if (static_cast<int>(row.tokens.size()) != d) {
        cur.fail(row, "table row has " + std::to_string(row.tokens.size()) + " labels, expected " + std::to_string(d));
      }
      for (int c = 0; c < d; ++c) {
        store(r, c, static_cast<Label>(cur.integer(row, row.tokens[static_cast<std::size_t>(c)], 0, d - 1, "label")));
      }
    }
  };

  while (!cur.done()) {
    const auto& h = cur.take();
    const auto kw = h.tokens[0].text;
    if (kw != "meet" && kw != "join" && kw != "mj1" && kw != "mj2" && kw != "mn3" && kw != "M") {
      cur.fail(h, h.tokens[0], "unknown section '" + std::string(kw) + "'");
    }
    if (h.tokens.size() < 2) cur.fail(h, "section needs a variable index");
    const int i = static_cast<int>(cur.integer(h, h.tokens[1], 1, n, "variable index")) - 1;
    const auto ui = static_cast<std::size_t>(i);
    const int d = domains.size(i);
    auto duplicate = [&] { cur.fail(h, "duplicate '" + std::string(kw) + " " + std::to_string(i + 1) + "' section"); };
    if (kw == "M") {
      if (m_seen[ui]) duplicate();
      m_seen[ui] = 1;
      for (std::size_t p = 2; p < h.tokens.size(); ++p) {
        const auto& tok = h.tokens[p];
        auto colon = tok.text.find(':');
        if (colon == std::string_view::npos) cur.fail(h, tok, "expected a pair 'a:b', got '" + std::string(tok.text) + "'");
        detail::Token ta{tok.text.substr(0, colon), tok.column};
        detail::Token tb{tok.text.substr(colon + 1), tok.column + static_cast<int>(colon) + 1};
        Label a = static_cast<Label>(cur.integer(h, ta, 0, d - 1, "label"));
        Label b = static_cast<Label>(cur.integer(h, tb, 0, d - 1, "label"));
        if (a == b) cur.fail(h, tok, "pair needs two distinct labels");
        if (ops.m.contains(i, a, b)) cur.fail(h, tok, "pair listed twice");
        ops.m.insert(i, a, b);
      }
      continue;
    }
    cur.arity(h, 2, std::string(kw).c_str());
    if (kw == "meet" || kw == "join") {
      auto& slot = kw == "meet" ? meet[ui] : join[ui];
      if (slot) duplicate();
      BinaryTable t(d);
      read_rows(h, d, d, [&](int r, int c, Label v) { t.set(r, c, v); });
      slot = std::move(t);
    } else {
      auto& slot = kw == "mj1" ? mj1[ui] : (kw == "mj2" ? mj2[ui] : mn3[ui]);
      if (slot) duplicate();
      TernaryTable t(d);
      read_rows(h, d, d * d, [&](int r, int c, Label v) { t.set(r / d, r % d, c, v); });
      slot = std::move(t);
    }
  }
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const std::string v = std::to_string(i + 1);
    if (!meet[ui]) cur.fail_at_end("missing 'meet " + v + "' section");
    if (!join[ui]) cur.fail_at_end("missing 'join " + v + "' section");
    if (!mj1[ui]) cur.fail_at_end("missing 'mj1 " + v + "' section");
    if (!mj2[ui]) cur.fail_at_end("missing 'mj2 " + v + "' section");
    if (!mn3[ui]) cur.fail_at_end("missing 'mn3 " + v + "' section");
    ops.pair.meet.push_back(std::move(*meet[ui]));
    ops.pair.join.push_back(std::move(*join[ui]));
    ops.triple.mj1.push_back(std::move(*mj1[ui]));
    ops.triple.mj2.push_back(std::move(*mj2[ui]));
    ops.triple.mn3.push_back(std::move(*mn3[ui]));
  }
  if (validate) {
    if (auto w = find_nonconservative(ops.pair)) throw ValidationError("non-conservative pair: " + w->describe());
    if (auto msg = validate_operation_system(ops)) throw ValidationError(*msg);
  }
  return ops;
}

inline OperationSystem load_ops(const std::string& path, const DomainSpec& domains, bool validate = true) {
  return parse_ops(read_file(path), domains, path, validate);
}

inline void write_ops(std::ostream& os, const OperationSystem& ops) {
  auto binary = [&](const char* name, int i, const BinaryTable& t) {
    os << name << ' ' << i + 1 << '\n';
    for (Label a = 0; a < t.domain_size(); ++a) {
      for (Label b = 0; b < t.domain_size(); ++b) os << (b ? " " : "") << t(a, b);
      os << '\n';
    }
  };
  auto ternary = [&](const char* name, int i, const TernaryTable& t) {
    os << name << ' ' << i + 1 << '\n';
    const int d = t.domain_size();
    for (Label a = 0; a < d; ++a)
      for (Label b = 0; b < d; ++b) {
        for (Label c = 0; c < d; ++c) os << (c ? " " : "") << t(a, b, c);
        os << '\n';
      }
  };
  for (int i = 0; i < ops.pair.variable_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    binary("meet", i, ops.pair.meet[ui]);
    binary("join", i, ops.pair.join[ui]);
    ternary("mj1", i, ops.triple.mj1[ui]);
    ternary("mj2", i, ops.triple.mj2[ui]);
    ternary("mn3", i, ops.triple.mn3[ui]);
    os << "M " << i + 1;
    for (auto [a, b] : ops.m.pairs(i)) os << ' ' << a << ':' << b;
    os << '\n';
  }
}

inline std::string ops_to_string(const OperationSystem& ops) {
  std::ostringstream os;
  write_ops(os, ops);
  return os.str();
}

// ---- results -----------------------------------------------------------------------------------

template <class C>
void write_result(std::ostream& os, const SolveResult<C>& r, bool timings = false) {
  os << "optimum: " << r.optimum << '\n';
  os << "argmin:";
  if (r.argmin) {
    for (Label a : *r.argmin) os << ' ' << a;
  } else {
    os << " none";
  }
  os << '\n';
  os << "path: " << to_string(r.stats.path) << '\n';
  if (!r.stats.fallback_reason.empty()) os << "fallback_reason: " << r.stats.fallback_reason << '\n';
  os << "stage2_iterations: " << r.stats.stage2_iterations << '\n';
  os << "consistency_revisions: " << r.stats.consistency_revisions << '\n';
  if (timings) {
    for (const auto& [stage, ms] : r.stats.timings_ms) os << "time_ms_" << stage << ": " << ms << '\n';
  }
}

template <class C>
nlohmann::json result_to_json(const SolveResult<C>& r, bool timings = false) {
  nlohmann::json j;
  j["optimum"] = r.optimum.to_string();
  j["argmin"] = r.argmin ? nlohmann::json(*r.argmin) : nlohmann::json(nullptr);
  j["path"] = to_string(r.stats.path);
  if (!r.stats.fallback_reason.empty()) j["fallback_reason"] = r.stats.fallback_reason;
  j["stage2_iterations"] = r.stats.stage2_iterations;
  j["consistency_revisions"] = r.stats.consistency_revisions;
  if (timings) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [stage, ms] : r.stats.timings_ms) t[stage] = ms;
    j["timings_ms"] = t;
  }
  return j;
}

}  // namespace vcsp
