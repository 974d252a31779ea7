// islp: command-line driver for the grammar toolkit.
#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "islp/access.hpp"
#include "islp/balance.hpp"
#include "islp/corpora.hpp"
#include "islp/measures.hpp"
#include "islp/transform.hpp"

using namespace islp;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_output(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << data;
}

BigInt parse_big(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError(std::string(what) + " must be a non-negative integer: " + s);
  return BigInt(s);
}

unsigned char parse_char(const std::string& s) {
  if (s.size() != 1) throw UsageError("expected a single character, got '" + s + "'");
  return static_cast<unsigned char>(s[0]);
}

std::vector<std::uint64_t> parse_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    out.push_back(static_cast<std::uint64_t>(parse_big(item, "list entry")));
  return out;
}

std::string format_rational(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

// Everything the verbs read from the command line.
struct Options {
  std::string file, out, text_file, map, pos, len, symbol;
  std::string family, ks;
  std::string sub, ins_before, ins_after, del;
  bool trace = false, want_delta = false, want_z = false, want_bwt = false, sentinel = false;
  std::size_t oracle_limit = kDefaultOracleLimit;
  std::uint64_t k = 5, index = 10, n = 64, seed = 1, queries = 1000, threads = 1;
  std::size_t max_length = 10'000;
};

Grammar load(const Options& o) { return parse_grammar(read_file(o.file)); }

void emit(const Options& o, const Grammar& g) { write_output(o.out, emit_grammar(g)); }

void print_stats(std::ostream& os, const Grammar& g) {
  std::size_t iters = 0, entries = 0;
  const AccessContext ctx(g);
  for (VariableId v = 0; v < g.num_vars(); ++v)
    if (const IterIndex* idx = ctx.index(v)) {
      ++iters;
      entries += idx->snapshot_entries();
    }
  os << "size=" << g.size() << "\nn=" << g.n() << "\nheight=" << g.height()
     << "\nd=" << g.max_degree() << "\nvars=" << g.num_vars() << "\niter_rules=" << iters
     << "\nsnapshot_entries=" << entries << "\nunfolded_height=" << unfolded_height(g) << '\n';
}

int run_access(const Options& o) {
  const AccessContext ctx(load(o));
  std::vector<TraceStep> trace;
  QueryStats stats;
  if (o.trace) stats.trace = &trace;
  const char c = ctx.access(parse_big(o.pos, "position"), &stats);
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const TraceStep& s = trace[j];
    std::cout << "level=" << j << " var=" << ctx.grammar().name(s.var) << " pos=" << s.position
              << " i=" << s.block << " r=" << s.factor << " off=" << s.offset
              << " child_pos=" << s.child_position << '\n';
  }
  std::cout << c << '\n';
  return 0;
}

int run_extract(const Options& o) {
  const AccessContext ctx(load(o));
  ctx.extract(parse_big(o.pos, "position"), parse_big(o.len, "length"),
              [](char c) { std::cout.put(c); });
  std::cout << '\n';
  return 0;
}

int run_balance(const Options& o) {
  const Grammar g = load(o);
  BalanceStats st;
  const Grammar b = balance(g, &st);
  std::ostringstream stats;
  // With -o the grammar goes to the file and the statistics to stdout;
  // otherwise they follow the grammar as comment lines so it still parses.
  const char* prefix = o.out.empty() ? "# " : "";
  stats << prefix << "old_size=" << st.old_size << '\n'
        << prefix << "new_size=" << st.new_size << '\n'
        << prefix << "old_height=" << st.old_height << '\n'
        << prefix << "new_height=" << st.new_height << '\n'
        << prefix << "sc_paths=" << st.sc_paths << '\n'
        << prefix << "max_in_log=" << st.max_in_log << '\n'
        << prefix << "max_out_log=" << st.max_out_log << '\n';
  emit(o, b);
  std::cout << stats.str();
  return 0;
}

int run_edit(const Options& o) {
  const int chosen = !o.sub.empty() + !o.ins_before.empty() + !o.ins_after.empty() + !o.del.empty();
  if (chosen != 1) throw UsageError("edit needs exactly one of --sub, --ins-before, --ins-after, --del");
  EditOp op{};
  std::string pos;
  if (!o.sub.empty()) op.kind = EditOp::Kind::kSubstitute, pos = o.sub;
  if (!o.ins_before.empty()) op.kind = EditOp::Kind::kInsertBefore, pos = o.ins_before;
  if (!o.ins_after.empty()) op.kind = EditOp::Kind::kInsertAfter, pos = o.ins_after;
  if (!o.del.empty()) op.kind = EditOp::Kind::kDelete, pos = o.del;
  op.position = parse_big(pos, "position");
  if (op.kind != EditOp::Kind::kDelete) {
    if (o.symbol.empty()) throw UsageError("edit needs a <char> argument");
    op.symbol = parse_char(o.symbol);
  } else if (!o.symbol.empty()) {
    throw UsageError("--del takes no <char>");
  }
  emit(o, edit(load(o), op));
  return 0;
}

int run_measure(const Options& o) {
  if (o.file.empty() == o.text_file.empty()) throw UsageError("measure needs a grammar file or --text");
  std::string t;
  if (o.text_file.empty()) {
    const Grammar g = load(o);
    t = expand(g, g.start(), o.oracle_limit);
  } else {
    t = read_file(o.text_file);
  }
  if (t.empty()) throw UsageError("empty text");
  const bool all = !o.want_delta && !o.want_z && !o.want_bwt;
  std::cout << "n=" << t.size() << '\n';
  if (all || o.want_delta) {
    const Rational d = delta(t);
    std::cout << "delta=" << format_rational(d) << '\n'
              << "delta_approx=" << static_cast<double>(d) << '\n';
  }
  if (all || o.want_z) std::cout << "z=" << lz76_z(t) << '\n';
  if (all || o.want_bwt) {
    if (all || !o.sentinel) std::cout << "bwt_runs=" << bwt_runs(t, false) << '\n';
    if (all || o.sentinel) std::cout << "bwt_runs_sentinel=" << bwt_runs(t, true) << '\n';
  }
  return 0;
}

int run_gen(const Options& o) {
  if (o.family == "sk") {
    write_output(o.out, emit_grammar(gen_sk(static_cast<BlockIndex>(o.k))));
  } else if (o.family == "fib") {
    write_output(o.out, gen_fibonacci(static_cast<unsigned>(o.index)));
  } else if (o.family == "tm") {
    write_output(o.out, o.ks.empty() ? thue_morse_prefix(o.n) : gen_thue_morse_concat(parse_list(o.ks)));
  } else if (o.family == "random") {
    RandomIslpParams p;
    p.seed = o.seed;
    p.max_length = o.max_length;
    write_output(o.out, emit_grammar(random_islp(p)));
  } else if (o.family == "chain") {
    write_output(o.out, emit_grammar(gen_left_chain(o.n)));
  } else if (o.family == "unbalanced") {
    write_output(o.out, emit_grammar(gen_random_unbalanced(o.seed, o.n)));
  } else {
    throw UsageError("unknown family " + o.family);
  }
  return 0;
}

int run_bench(const Options& o) {
  const AccessContext ctx(load(o));
  const std::uint64_t threads = std::max<std::uint64_t>(1, o.threads);
  // Positions are drawn up front so the timed region only runs queries.
  Rng rng(o.seed);
  const BigInt& n = ctx.n();
  std::vector<BigInt> positions(o.queries);
  for (auto& p : positions) {
    BigInt r = 0;
    for (int w = 0; w < 4; ++w) r = (r << 64) | rng.next();
    p = r % n + 1;
  }
  std::vector<std::size_t> evals(threads, 0), levels(threads, 0);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::thread> pool;
  for (std::uint64_t w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t q = w; q < positions.size(); q += threads) {
        QueryStats st;
        ctx.access(positions[q], &st);
        evals[w] += st.evaluations;
        levels[w] += st.levels;
      }
    });
  for (auto& t : pool) t.join();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double q = static_cast<double>(std::max<std::uint64_t>(1, o.queries));
  std::size_t e = 0, l = 0;
  for (std::uint64_t w = 0; w < threads; ++w) e += evals[w], l += levels[w];
  std::cout << "queries=" << o.queries << "\nthreads=" << threads
            << "\nmean_evaluations=" << static_cast<double>(e) / q
            << "\nmean_levels=" << static_cast<double>(l) / q
            << "\nmicros_per_access=" << secs * 1e6 / q * static_cast<double>(threads) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterated straight-line program toolkit"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--oracle-limit", o.oracle_limit, "Largest text the explicit expansion may build")
      ->default_val(kDefaultOracleLimit);

  auto grammar_verb = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("grammar", o.file, "Grammar file ('-' for stdin)")->required();
    return sub;
  };
  auto with_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", o.out, "Output file (default stdout)");
    return sub;
  };

  CLI::App* c_expand = with_output(grammar_verb("expand", "Print the full text"));
  CLI::App* c_access = grammar_verb("access", "Print T[pos] (1-based)");
  c_access->add_option("pos", o.pos)->required();
  c_access->add_flag("--trace", o.trace, "Print the (i, r, offset) decision at each level");
  CLI::App* c_extract = grammar_verb("extract", "Print T[pos..pos+len-1]");
  c_extract->add_option("pos", o.pos)->required();
  c_extract->add_option("len", o.len)->required();
  CLI::App* c_balance = with_output(grammar_verb("balance", "Rebalance to logarithmic height"));
  CLI::App* c_clamp = with_output(grammar_verb("clamp", "Clamp exponents to log2 n"));
  CLI::App* c_reverse = with_output(grammar_verb("reverse", "Grammar for the reversed text"));
  CLI::App* c_morph = with_output(grammar_verb("morph", "Apply a morphism"));
  c_morph->add_option("--map", o.map, "Morphism, e.g. 'a=ab,b=b'")->required();
  CLI::App* c_edit = with_output(grammar_verb("edit", "Apply one single-character edit"));
  c_edit->add_option("--sub", o.sub, "Substitute at <pos>");
  c_edit->add_option("--ins-before", o.ins_before, "Insert before <pos>");
  c_edit->add_option("--ins-after", o.ins_after, "Insert after <pos>");
  c_edit->add_option("--del", o.del, "Delete at <pos>");
  c_edit->add_option("char", o.symbol, "Symbol for substitution or insertion");
  CLI::App* c_stats = grammar_verb("stats", "Print size, length, height and degree");
  CLI::App* c_emit = with_output(grammar_verb("emit", "Parse and re-emit in canonical form"));

  CLI::App* c_measure = app.add_subcommand("measure", "Repetitiveness measures of the text");
  c_measure->add_option("grammar", o.file, "Grammar file");
  c_measure->add_option("--text", o.text_file, "Plain text file instead of a grammar");
  c_measure->add_flag("--delta", o.want_delta);
  c_measure->add_flag("--z", o.want_z);
  c_measure->add_flag("--bwt-runs", o.want_bwt);
  c_measure->add_flag("--sentinel", o.sentinel, "Append a smallest sentinel before the BWT");

  CLI::App* c_gen = with_output(app.add_subcommand("gen", "Generate a corpus member"));
  c_gen->add_option("--family", o.family, "sk | fib | tm | random | chain | unbalanced")
      ->required()
      ->check(CLI::IsMember({"sk", "fib", "tm", "random", "chain", "unbalanced"}));
  c_gen->add_option("--k", o.k, "sk: number of blocks");
  c_gen->add_option("--index", o.index, "fib: word index");
  c_gen->add_option("--n", o.n, "tm: prefix length; chain, unbalanced: text length");
  c_gen->add_option("--ks", o.ks, "tm: comma-separated block lengths, largest first");
  c_gen->add_option("--seed", o.seed, "random, unbalanced: seed");
  c_gen->add_option("--max-length", o.max_length, "random: length cap");

  CLI::App* c_bench = grammar_verb("bench", "Time random access queries");
  c_bench->add_option("--queries", o.queries)->default_val(1000);
  c_bench->add_option("--seed", o.seed);
  c_bench->add_option("--threads", o.threads)->default_val(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (c_expand->parsed()) {
      const Grammar g = load(o);
      write_output(o.out, expand(g, g.start(), o.oracle_limit) + "\n");
    } else if (c_access->parsed()) {
      return run_access(o);
    } else if (c_extract->parsed()) {
      return run_extract(o);
    } else if (c_balance->parsed()) {
      return run_balance(o);
    } else if (c_clamp->parsed()) {
      emit(o, clamp_degree(load(o)));
    } else if (c_reverse->parsed()) {
      emit(o, reverse(load(o)));
    } else if (c_morph->parsed()) {
      emit(o, apply_morphism(load(o), parse_morphism(o.map)));
    } else if (c_edit->parsed()) {
      return run_edit(o);
    } else if (c_stats->parsed()) {
      print_stats(std::cout, load(o));
    } else if (c_emit->parsed()) {
      emit(o, load(o));
    } else if (c_measure->parsed()) {
      return run_measure(o);
    } else if (c_gen->parsed()) {
      return run_gen(o);
    } else if (c_bench->parsed()) {
      return run_bench(o);
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "islp: " << e.what() << '\n' << app.help();
    return 1;
  } catch (const GrammarError& e) {
    std::cerr << "islp: grammar error: " << e.what() << '\n';
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "islp: range error: " << e.what() << '\n';
    return 3;
  } catch (const std::out_of_range& e) {
    std::cerr << "islp: range error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "islp: " << e.what() << '\n';
    return 1;
  }
}
