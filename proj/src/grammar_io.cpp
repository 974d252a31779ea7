#include <cctype>
#include <charconv>
#include <sstream>

#include "islp/grammar.hpp"

namespace islp {

namespace {

struct PendingFactor {
  std::string name;
  Exponent exp;
  std::size_t column;
};

struct PendingRule {
  std::string name;
  std::size_t line;
  Rule rule;  // child ids filled in after all names are known
  std::vector<std::pair<std::string, std::size_t>> refs;
};

class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw GrammarError("line " + std::to_string(line_) + ", column " +
                       std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\r'))
      ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  std::size_t column() const { return pos_ + 1; }

  void expect(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) != tok) fail("expected '" + std::string(tok) + "'");
    pos_ += tok.size();
  }

  std::string name() {
    skip_ws();
    const std::size_t begin = pos_;
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
    }
    if (begin == pos_) fail("expected variable name");
    return std::string(text_.substr(begin, pos_ - begin));
  }

  std::uint64_t number() {
    skip_ws();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec == std::errc::result_out_of_range) fail("integer too large");
    if (ec != std::errc()) fail("expected integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  unsigned char quoted_char() {
    expect("'");
    if (pos_ >= text_.size()) fail("unterminated character literal");
    unsigned char c = static_cast<unsigned char>(text_[pos_++]);
    if (c == '\'') fail("empty character literal");
    if (c == '\\') {
      if (pos_ >= text_.size()) fail("unterminated escape");
      switch (text_[pos_++]) {
        case '\'': c = '\''; break;
        case '\\': c = '\\'; break;
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        default: --pos_; fail("unknown escape");
      }
    }
    if (pos_ >= text_.size() || text_[pos_] != '\'') fail("expected closing quote");
    ++pos_;
    return c;
  }

  bool keyword(std::string_view kw) {
    skip_ws();
    if (text_.substr(pos_, kw.size()) != kw) return false;
    const std::size_t after = pos_ + kw.size();
    if (after < text_.size() &&
        (std::isalnum(static_cast<unsigned char>(text_[after])) || text_[after] == '_'))
      return false;
    pos_ = after;
    return true;
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::string escape_char(unsigned char c) {
  switch (c) {
    case '\'': return "\\'";
    case '\\': return "\\\\";
    case '\n': return "\\n";
    case '\t': return "\\t";
    default: return std::string(1, static_cast<char>(c));
  }
}

}  // namespace

Grammar parse_grammar(std::string_view text) {
  std::vector<PendingRule> pending;
  std::optional<std::pair<std::string, std::size_t>> start;

  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;

    LineCursor cur(line, line_no);
    if (cur.at_end() || cur.peek() == '#') continue;
    if (start) cur.fail("content after start line");

    if (cur.keyword("start")) {
      const std::size_t col = cur.column();
      std::string nm = cur.name();
      if (!cur.at_end()) cur.fail("trailing characters");
      start = {std::move(nm), line_no};
      (void)col;
      continue;
    }

    PendingRule pr;
    pr.line = line_no;
    pr.name = cur.name();
    cur.expect("=");
    if (cur.peek() == '\'') {
      pr.rule = Terminal{cur.quoted_char()};
    } else if (cur.keyword("prod")) {
      cur.expect("i");
      if (!cur.keyword("in")) cur.fail("expected 'in'");
      Iter it{};
      it.k1 = cur.number();
      cur.expect("..");
      it.k2 = cur.number();
      cur.expect("{");
      while (cur.peek() != '}') {
        if (cur.at_end()) cur.fail("expected '}'");
        const std::size_t col = cur.column();
        std::string nm = cur.name();
        cur.expect("^");
        cur.expect("(");
        cur.expect("i");
        cur.expect("^");
        const std::uint64_t c = cur.number();
        if (c > std::numeric_limits<Exponent>::max()) cur.fail("exponent too large");
        cur.expect(")");
        it.factors.push_back(Factor{0, static_cast<Exponent>(c)});
        pr.refs.emplace_back(std::move(nm), col);
      }
      cur.expect("}");
      if (it.k1 == 0 || it.k2 == 0) cur.fail("iteration bounds must be >= 1");
      if (it.factors.empty()) cur.fail("iteration rule has no factors");
      pr.rule = std::move(it);
    } else {
      const std::size_t c1 = cur.column();
      std::string l = cur.name();
      const std::size_t c2 = cur.column();
      std::string r = cur.name();
      pr.refs.emplace_back(std::move(l), c1);
      pr.refs.emplace_back(std::move(r), c2);
      pr.rule = Binary{0, 0};
    }
    if (!cur.at_end()) cur.fail("trailing characters");
    pending.push_back(std::move(pr));
  }

  if (!start) throw GrammarError("missing 'start NAME' line");

  std::unordered_map<std::string, VariableId> ids;
  for (std::size_t v = 0; v < pending.size(); ++v) {
    if (!ids.emplace(pending[v].name, static_cast<VariableId>(v)).second)
      throw GrammarError("line " + std::to_string(pending[v].line) +
                         ": duplicate definition of '" + pending[v].name + "'");
  }
  auto resolve = [&](const std::string& nm, std::size_t line, std::size_t col) {
    auto it = ids.find(nm);
    if (it == ids.end())
      throw GrammarError("line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": undefined variable '" + nm + "'");
    return it->second;
  };

  GrammarBuilder b;
  for (auto& pr : pending) {
    if (auto* bin = std::get_if<Binary>(&pr.rule)) {
      bin->left = resolve(pr.refs[0].first, pr.line, pr.refs[0].second);
      bin->right = resolve(pr.refs[1].first, pr.line, pr.refs[1].second);
    } else if (auto* it = std::get_if<Iter>(&pr.rule)) {
      for (std::size_t j = 0; j < it->factors.size(); ++j)
        it->factors[j].var = resolve(pr.refs[j].first, pr.line, pr.refs[j].second);
    }
    b.add(std::move(pr.name), std::move(pr.rule));
  }
  b.set_start(resolve(start->first, start->second, 7));
  return std::move(b).build(/*prune=*/false);
}

std::string emit_grammar(const Grammar& g) {
  std::ostringstream os;
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    os << g.name(v) << " = ";
    const Rule& r = g.rule(v);
    if (const auto* t = std::get_if<Terminal>(&r)) {
      os << '\'' << escape_char(t->symbol) << '\'';
    } else if (const auto* b = std::get_if<Binary>(&r)) {
      os << g.name(b->left) << ' ' << g.name(b->right);
    } else {
      const auto& it = std::get<Iter>(r);
      os << "prod i in " << it.k1 << ".." << it.k2 << " {";
      for (const auto& f : it.factors) os << ' ' << g.name(f.var) << "^(i^" << f.exp << ')';
      os << " }";
    }
    os << '\n';
  }
  os << "start " << g.name(g.start()) << '\n';
  return os.str();
}

}  // namespace islp
