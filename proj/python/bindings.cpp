#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "islp/access.hpp"
#include "islp/balance.hpp"
#include "islp/corpora.hpp"
#include "islp/measures.hpp"
#include "islp/transform.hpp"

namespace py = pybind11;
using namespace islp;

namespace {

// Python ints of any size travel as decimal strings.
py::int_ to_py(const BigInt& v) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(v.str().c_str(), nullptr, 10));
}

BigInt from_py(const py::int_& v) { return BigInt(py::str(v).cast<std::string>()); }

py::object fraction(const Rational& r) {
  return py::module_::import("fractions").attr("Fraction")(to_py(numerator(r)), to_py(denominator(r)));
}

EditOp::Kind edit_kind(const std::string& s) {
  if (s == "sub") return EditOp::Kind::kSubstitute;
  if (s == "ins-before") return EditOp::Kind::kInsertBefore;
  if (s == "ins-after") return EditOp::Kind::kInsertAfter;
  if (s == "del") return EditOp::Kind::kDelete;
  throw py::value_error("edit kind must be sub, ins-before, ins-after or del");
}

unsigned char one_char(const std::string& s) {
  if (s.size() != 1) throw py::value_error("expected a single character");
  return static_cast<unsigned char>(s[0]);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Iterated straight-line programs: access, transforms, balancing, measures";

  auto grammar_error = py::register_exception<GrammarError>(m, "GrammarError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
  (void)grammar_error;

  py::class_<Grammar>(m, "Grammar")
      .def_static("parse", &parse_grammar, py::arg("text"))
      .def("emit", &emit_grammar)
      .def("expand", [](const Grammar& g, std::size_t limit) { return expand(g, g.start(), limit); },
           py::arg("limit") = kDefaultOracleLimit)
      .def_property_readonly("n", [](const Grammar& g) { return to_py(g.n()); })
      .def_property_readonly("size", &Grammar::size)
      .def_property_readonly("height", &Grammar::height)
      .def_property_readonly("max_degree", &Grammar::max_degree)
      .def_property_readonly("num_vars", &Grammar::num_vars)
      .def("__eq__", &Grammar::operator==)
      .def("__repr__", [](const Grammar& g) {
        return "<Grammar size=" + std::to_string(g.size()) + " n=" + g.n().str() + ">";
      });

  py::class_<AccessContext>(m, "Index")
      .def(py::init<const Grammar&>(), py::arg("grammar"))
      .def_property_readonly("n", [](const AccessContext& c) { return to_py(c.n()); })
      .def("access", [](const AccessContext& c, const py::int_& l) { return std::string(1, c.access(from_py(l))); },
           py::arg("position"))
      .def("access_stats",
           [](const AccessContext& c, const py::int_& l) {
             QueryStats st;
             const char ch = c.access(from_py(l), &st);
             py::dict d;
             d["char"] = std::string(1, ch);
             d["evaluations"] = st.evaluations;
             d["levels"] = st.levels;
             return d;
           },
           py::arg("position"))
      .def("extract",
           [](const AccessContext& c, const py::int_& l, const py::int_& len) {
             return py::bytes(c.extract(from_py(l), from_py(len)));
           },
           py::arg("position"), py::arg("length"));

  m.def("clamp_degree", [](const Grammar& g) { return clamp_degree(g); });
  m.def("reverse", &reverse);
  m.def("apply_morphism",
        [](const Grammar& g, const std::map<std::string, std::string>& phi) {
          std::map<unsigned char, std::string> table;
          for (const auto& [k, v] : phi) table[one_char(k)] = v;
          return apply_morphism(g, table);
        },
        py::arg("grammar"), py::arg("phi"));
  m.def("edit",
        [](const Grammar& g, const std::string& kind, const py::int_& pos, const std::string& ch) {
          EditOp op{edit_kind(kind), from_py(pos)};
          if (op.kind != EditOp::Kind::kDelete) op.symbol = one_char(ch);
          return edit(g, op);
        },
        py::arg("grammar"), py::arg("kind"), py::arg("position"), py::arg("char") = "");

  m.def("balance", [](const Grammar& g) {
    BalanceStats st;
    Grammar b = balance(g, &st);
    py::dict d;
    d["old_size"] = st.old_size;
    d["new_size"] = st.new_size;
    d["old_height"] = st.old_height;
    d["new_height"] = st.new_height;
    d["sc_paths"] = st.sc_paths;
    d["max_in_log"] = st.max_in_log;
    d["max_out_log"] = st.max_out_log;
    return py::make_tuple(std::move(b), d);
  });

  m.def("delta", [](const py::bytes& t) { return fraction(delta(std::string(t))); });
  m.def("lz76_z", [](const py::bytes& t) { return lz76_z(std::string(t)); });
  m.def("bwt_runs", [](const py::bytes& t, bool sentinel) { return bwt_runs(std::string(t), sentinel); },
        py::arg("text"), py::arg("sentinel") = false);

  m.def("gen_sk", &gen_sk, py::arg("k"));
  m.def("gen_fibonacci", [](unsigned i) { return py::bytes(gen_fibonacci(i)); }, py::arg("i"));
  m.def("thue_morse_prefix", [](std::size_t n) { return py::bytes(thue_morse_prefix(n)); }, py::arg("n"));
  m.def("gen_thue_morse_concat",
        [](const std::vector<std::uint64_t>& ks) { return py::bytes(gen_thue_morse_concat(ks)); },
        py::arg("ks"));
  m.def("gen_left_chain", [](std::size_t n) { return gen_left_chain(n); }, py::arg("n"));
  m.def("gen_random_unbalanced",
        [](std::uint64_t seed, std::size_t n) { return gen_random_unbalanced(seed, n); },
        py::arg("seed"), py::arg("n"));
  m.def("random_islp",
        [](std::uint64_t seed, std::size_t max_length) {
          RandomIslpParams p;
          p.seed = seed;
          p.max_length = max_length;
          return random_islp(p);
        },
        py::arg("seed"), py::arg("max_length") = 10'000);
}
