#include "fkdet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fkdet/error.hpp"

namespace fkdet {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  fail("scenario " + (path.empty() ? std::string("document") : path) + ": " + what);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string child(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

// Object reader that rejects unknown keys once all expected ones are read.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) schema_error(path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!obj_.contains(key)) schema_error(child(path_, key), "missing required field");
    return obj_.at(key);
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return child(path_, key); }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) schema_error(child(path_, it.key()), "unknown field");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(path, "expected a finite number");
  return d;
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15)
      return static_cast<std::int64_t>(d);
  }
  schema_error(path, "expected an integer");
}

std::size_t as_index(const json& v, const std::string& path) {
  const std::int64_t i = as_int(v, path);
  if (i < 0) schema_error(path, "expected a nonnegative integer");
  return static_cast<std::size_t>(i);
}

Complex as_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {as_double(v, path), 0.0};
  if (v.is_array() && v.size() == 2)
    return {as_double(v[0], child(path, 0)), as_double(v[1], child(path, 1))};
  if (v.is_object()) {
    Fields f(v, path);
    const double re = f.find("re") ? as_double(*f.find("re"), f.path("re")) : 0.0;
    const double im = f.find("im") ? as_double(*f.find("im"), f.path("im")) : 0.0;
    f.finish();
    return {re, im};
  }
  schema_error(path, "expected a number, [re, im] or {\"re\", \"im\"}");
}

template <typename T, typename Fn>
std::vector<T> as_list(const json& v, const std::string& path, Fn item) {
  if (!v.is_array()) schema_error(path, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(item(v[i], child(path, i)));
  return out;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

const char* theorem_name(Theorem t) {
  switch (t) {
    case Theorem::DominantTerm: return "r1";
    case Theorem::DisjointRanges: return "r2";
    case Theorem::Deninger: return "deninger";
    case Theorem::Multiplication: return "mf";
  }
  return "?";
}

Theorem parse_theorem(const std::string& s, const std::string& path) {
  if (s == "r1") return Theorem::DominantTerm;
  if (s == "r2") return Theorem::DisjointRanges;
  if (s == "deninger") return Theorem::Deninger;
  if (s == "mf") return Theorem::Multiplication;
  schema_error(path, "unknown theorem '" + s + "' (expected r1, r2, deninger or mf)");
}

const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::Determinant: return "determinant";
    case TaskKind::CheckR1: return "check_r1";
    case TaskKind::CheckR2: return "check_r2";
    case TaskKind::Deninger: return "deninger";
    case TaskKind::TraceProfile: return "trace_profile";
    case TaskKind::Sweep: return "sweep";
  }
  return "?";
}

GeneratorSpec parse_generator(const json& v, const std::string& path) {
  Fields f(v, path);
  GeneratorSpec g;
  g.name = as_string(f.at("name"), f.path("name"));
  const std::string kind = as_string(f.at("kind"), f.path("kind"));
  if (kind == "rotation") {
    RotationSpec r;
    if (auto* p = f.find("p")) r.p = as_int(*p, f.path("p"));
    if (auto* a = f.find("alpha")) r.alpha = as_double(*a, f.path("alpha"));
    if (r.p.has_value() == r.alpha.has_value())
      schema_error(path, "rotation needs exactly one of 'p' or 'alpha'");
    g.kind = r;
  } else if (kind == "table") {
    TableSpec t;
    t.pairs = as_list<std::pair<std::size_t, std::size_t>>(
        f.at("pairs"), f.path("pairs"), [](const json& e, const std::string& p) {
          if (!e.is_array() || e.size() != 2) schema_error(p, "expected [source, target]");
          return std::pair{as_index(e[0], child(p, 0)), as_index(e[1], child(p, 1))};
        });
    g.kind = t;
  } else if (kind == "restrict") {
    RestrictSpec r;
    r.base = as_string(f.at("base"), f.path("base"));
    if (auto* c = f.find("cells"))
      r.cells = as_list<std::size_t>(*c, f.path("cells"), as_index);
    if (auto* iv = f.find("interval")) {
      if (!iv->is_array() || iv->size() != 2)
        schema_error(f.path("interval"), "expected [lo, hi]");
      r.interval = std::pair{as_double((*iv)[0], child(f.path("interval"), 0)),
                             as_double((*iv)[1], child(f.path("interval"), 1))};
    }
    if (r.cells.has_value() == r.interval.has_value())
      schema_error(path, "restrict needs exactly one of 'cells' or 'interval'");
    g.kind = r;
  } else if (kind == "interval_exchange") {
    IntervalExchangeSpec e;
    e.cuts = as_list<double>(f.at("cuts"), f.path("cuts"), as_double);
    e.order = as_list<std::size_t>(f.at("order"), f.path("order"), as_index);
    g.kind = e;
  } else {
    schema_error(f.path("kind"), "unknown generator kind '" + kind + "'");
  }
  f.finish();
  return g;
}

FunctionSpec parse_function(const json& v, const std::string& path) {
  Fields f(v, path);
  FunctionSpec fn;
  fn.name = as_string(f.at("name"), f.path("name"));
  const std::string kind = as_string(f.at("kind"), f.path("kind"));
  if (kind == "constant") {
    fn.kind = ConstantFn{as_complex(f.at("value"), f.path("value"))};
  } else if (kind == "table") {
    fn.kind = TableFn{as_list<Complex>(f.at("values"), f.path("values"), as_complex)};
  } else if (kind == "sampled") {
    const std::string family = as_string(f.at("family"), f.path("family"));
    if (family == "fourier") {
      FourierFn s;
      s.k = static_cast<int>(as_int(f.at("k"), f.path("k")));
      if (auto* sc = f.find("scale")) s.scale = as_complex(*sc, f.path("scale"));
      fn.kind = s;
    } else if (family == "polynomial") {
      fn.kind = PolynomialFn{as_list<Complex>(f.at("coeffs"), f.path("coeffs"), as_complex)};
    } else if (family == "step") {
      StepFn s;
      s.cuts = as_list<double>(f.at("cuts"), f.path("cuts"), as_double);
      s.values = as_list<Complex>(f.at("values"), f.path("values"), as_complex);
      fn.kind = s;
    } else {
      schema_error(f.path("family"), "unknown sampled family '" + family +
                                         "' (expected fourier, polynomial or step)");
    }
  } else {
    schema_error(f.path("kind"), "unknown function kind '" + kind + "'");
  }
  f.finish();
  return fn;
}

TaskSpec parse_task(const json& v, const std::string& path) {
  Fields f(v, path);
  TaskSpec t;
  const std::string kind = as_string(f.at("kind"), f.path("kind"));
  auto read_nmax = [&]() {
    if (auto* n = f.find("nMax")) {
      const std::int64_t m = as_int(*n, f.path("nMax"));
      if (m < 1 || m > 100000) schema_error(f.path("nMax"), "nMax must be in [1, 100000]");
      t.n_max = static_cast<unsigned>(m);
    }
  };
  if (kind == "determinant") {
    t.kind = TaskKind::Determinant;
  } else if (kind == "check_r1") {
    t.kind = TaskKind::CheckR1;
    if (auto* i = f.find("i0")) t.i0 = as_index(*i, f.path("i0"));
  } else if (kind == "check_r2") {
    t.kind = TaskKind::CheckR2;
  } else if (kind == "deninger") {
    t.kind = TaskKind::Deninger;
    if (auto* z = f.find("z")) t.z = as_complex(*z, f.path("z"));
    read_nmax();
  } else if (kind == "trace_profile") {
    t.kind = TaskKind::TraceProfile;
    read_nmax();
  } else if (kind == "sweep") {
    t.kind = TaskKind::Sweep;
    t.theorem = parse_theorem(as_string(f.at("theorem"), f.path("theorem")),
                              f.path("theorem"));
    if (auto* ns = f.find("Ns")) t.ns = as_list<std::size_t>(*ns, f.path("Ns"), as_index);
    if (t.theorem == Theorem::DominantTerm)
      if (auto* i = f.find("i0")) t.i0 = as_index(*i, f.path("i0"));
    if (t.theorem == Theorem::Deninger)
      if (auto* z = f.find("z")) t.z = as_complex(*z, f.path("z"));
  } else {
    schema_error(f.path("kind"), "unknown task '" + kind + "'");
  }
  f.finish();
  if (t.kind == TaskKind::Deninger || (t.kind == TaskKind::Sweep && t.theorem == Theorem::Deninger))
    if (t.z == Complex(0.0)) schema_error(child(path, "z"), "z must be nonzero");
  return t;
}

Tolerances parse_tolerances(const json& v, const std::string& path) {
  Fields f(v, path);
  Tolerances t;
  auto positive = [&](const char* key, auto& slot, std::int64_t max) {
    if (auto* x = f.find(key)) {
      const std::int64_t i = as_int(*x, f.path(key));
      if (i < 1 || i > max) schema_error(f.path(key), "out of range");
      slot = static_cast<std::remove_reference_t<decltype(slot)>>(i);
    }
  };
  positive("treeing_max_len", t.treeing_max_len, 64);
  positive("term_cap", t.term_cap, 1000000000);
  positive("radius_k_max", t.radius_k_max, 30);
  f.finish();
  return t;
}

bool generator_parametric(const ScenarioConfig& c, const GeneratorSpec& g) {
  if (std::holds_alternative<TableSpec>(g.kind)) return false;
  if (const auto* r = std::get_if<RestrictSpec>(&g.kind)) {
    if (r->cells) return false;
    for (const auto& other : c.generators)
      if (other.name == r->base) return generator_parametric(c, other);
    return false;
  }
  return true;
}

}  // namespace

bool ScenarioConfig::is_parametric() const {
  for (const auto& g : generators)
    if (!generator_parametric(*this, g)) return false;
  for (const auto& f : functions)
    if (std::holds_alternative<TableFn>(f.kind)) return false;
  return true;
}

ScenarioConfig parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << "scenario line " << line << ", column " << col << ": malformed JSON";
    fail(msg.str());
  }
  return parse_scenario(doc);
}

ScenarioConfig parse_scenario(const json& doc) {
  Fields f(doc, "");
  ScenarioConfig c;
  if (auto* v = f.find("schema_version")) {
    c.schema_version = static_cast<int>(as_int(*v, "schema_version"));
    if (c.schema_version != kSchemaVersion)
      schema_error("schema_version", "unsupported version " + std::to_string(c.schema_version));
  }
  if (auto* n = f.find("N")) {
    c.n = n->is_array() ? as_list<std::size_t>(*n, "N", as_index)
                        : std::vector<std::size_t>{as_index(*n, "N")};
    if (c.n.empty()) schema_error("N", "empty list");
    for (std::size_t k : c.n)
      if (k < 1 || k > 65536) schema_error("N", "cell counts must be in [1, 65536]");
  }
  c.generators = as_list<GeneratorSpec>(f.at("generators"), "generators", parse_generator);
  c.functions = as_list<FunctionSpec>(f.at("functions"), "functions", parse_function);
  c.op = as_list<OperatorTermSpec>(
      f.at("operator"), "operator", [](const json& e, const std::string& p) {
        if (e.is_array() && e.size() == 2)
          return OperatorTermSpec{as_string(e[0], child(p, 0)), as_string(e[1], child(p, 1))};
        Fields t(e, p);
        OperatorTermSpec out{as_string(t.at("function"), t.path("function")),
                             as_string(t.at("generator"), t.path("generator"))};
        t.finish();
        return out;
      });
  c.task = parse_task(f.at("task"), "task");
  if (auto* t = f.find("tolerances")) c.tolerances = parse_tolerances(*t, "tolerances");
  f.finish();

  // Names and references.
  std::set<std::string> gen_names;
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    const auto& g = c.generators[i];
    if (const auto* r = std::get_if<RestrictSpec>(&g.kind))
      if (!gen_names.count(r->base))
        schema_error(child(child("generators", i), "base"),
                     "unknown generator '" + r->base + "' (bases must be declared earlier)");
    if (!gen_names.insert(g.name).second)
      schema_error(child("generators", i), "duplicate generator name '" + g.name + "'");
  }
  std::set<std::string> fn_names;
  for (std::size_t i = 0; i < c.functions.size(); ++i)
    if (!fn_names.insert(c.functions[i].name).second)
      schema_error(child("functions", i),
                   "duplicate function name '" + c.functions[i].name + "'");
  for (std::size_t i = 0; i < c.op.size(); ++i) {
    if (!fn_names.count(c.op[i].function))
      schema_error(child("operator", i), "unknown function '" + c.op[i].function + "'");
    if (!gen_names.count(c.op[i].generator))
      schema_error(child("operator", i), "unknown generator '" + c.op[i].generator + "'");
  }
  if (c.op.empty()) schema_error("operator", "needs at least one term");

  // Task consistency.
  const bool sweep = c.task.kind == TaskKind::Sweep;
  if (sweep) {
    if (c.task.ns.empty()) {
      if (c.n.size() < 1) schema_error("task.Ns", "sweep needs Ns or an N list");
      c.task.ns = c.n;
    }
    if (!c.is_parametric()) schema_error("task", "non-parametric scenario");
  } else {
    if (c.n.empty()) schema_error("N", "missing required field");
    if (c.n.size() != 1) schema_error("N", "an N list requires a sweep task");
  }
  if ((c.task.kind == TaskKind::CheckR1 ||
       (sweep && c.task.theorem == Theorem::DominantTerm)) &&
      c.task.i0 >= c.op.size())
    schema_error("task.i0", "term index out of range");

  // Instantiate once at every resolution that will be used; this surfaces
  // non-injective tables and off-grid cut points at parse time.
  std::vector<std::size_t> all = c.n;
  all.insert(all.end(), c.task.ns.begin(), c.task.ns.end());
  for (std::size_t k : all) {
    if (k < 1 || k > 65536) schema_error("task.Ns", "cell counts must be in [1, 65536]");
    try {
      instantiate(c, k);
    } catch (const Error& e) {
      fail("scenario at N=" + std::to_string(k) + ": " + e.what());
    }
  }
  return c;
}

json to_json(const ScenarioConfig& c) {
  json doc;
  doc["schema_version"] = c.schema_version;
  if (c.n.size() == 1) {
    doc["N"] = c.n.front();
  } else if (!c.n.empty()) {
    doc["N"] = c.n;
  }

  json gens = json::array();
  for (const auto& g : c.generators) {
    json e{{"name", g.name}};
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, RotationSpec>) {
            e["kind"] = "rotation";
            if (k.p) e["p"] = *k.p;
            if (k.alpha) e["alpha"] = *k.alpha;
          } else if constexpr (std::is_same_v<K, TableSpec>) {
            e["kind"] = "table";
            json pairs = json::array();
            for (const auto& [s, t] : k.pairs) pairs.push_back({s, t});
            e["pairs"] = pairs;
          } else if constexpr (std::is_same_v<K, RestrictSpec>) {
            e["kind"] = "restrict";
            e["base"] = k.base;
            if (k.cells) e["cells"] = *k.cells;
            if (k.interval) e["interval"] = {k.interval->first, k.interval->second};
          } else {
            e["kind"] = "interval_exchange";
            e["cuts"] = k.cuts;
            e["order"] = k.order;
          }
        },
        g.kind);
    gens.push_back(e);
  }
  doc["generators"] = gens;

  json fns = json::array();
  for (const auto& f : c.functions) {
    json e{{"name", f.name}};
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, ConstantFn>) {
            e["kind"] = "constant";
            e["value"] = complex_json(k.value);
          } else if constexpr (std::is_same_v<K, TableFn>) {
            e["kind"] = "table";
            json vals = json::array();
            for (Complex v : k.values) vals.push_back(complex_json(v));
            e["values"] = vals;
          } else if constexpr (std::is_same_v<K, FourierFn>) {
            e["kind"] = "sampled";
            e["family"] = "fourier";
            e["k"] = k.k;
            e["scale"] = complex_json(k.scale);
          } else if constexpr (std::is_same_v<K, PolynomialFn>) {
            e["kind"] = "sampled";
            e["family"] = "polynomial";
            json co = json::array();
            for (Complex v : k.coeffs) co.push_back(complex_json(v));
            e["coeffs"] = co;
          } else {
            e["kind"] = "sampled";
            e["family"] = "step";
            e["cuts"] = k.cuts;
            json vals = json::array();
            for (Complex v : k.values) vals.push_back(complex_json(v));
            e["values"] = vals;
          }
        },
        f.kind);
    fns.push_back(e);
  }
  doc["functions"] = fns;

  json op = json::array();
  for (const auto& t : c.op) op.push_back({{"function", t.function}, {"generator", t.generator}});
  doc["operator"] = op;

  json task{{"kind", task_name(c.task.kind)}};
  switch (c.task.kind) {
    case TaskKind::CheckR1: task["i0"] = c.task.i0; break;
    case TaskKind::Deninger:
      task["z"] = complex_json(c.task.z);
      task["nMax"] = c.task.n_max;
      break;
    case TaskKind::TraceProfile: task["nMax"] = c.task.n_max; break;
    case TaskKind::Sweep:
      task["theorem"] = theorem_name(c.task.theorem);
      task["Ns"] = c.task.ns;
      if (c.task.theorem == Theorem::DominantTerm) task["i0"] = c.task.i0;
      if (c.task.theorem == Theorem::Deninger) task["z"] = complex_json(c.task.z);
      break;
    default: break;
  }
  doc["task"] = task;

  doc["tolerances"] = {{"treeing_max_len", c.tolerances.treeing_max_len},
                       {"term_cap", c.tolerances.term_cap},
                       {"radius_k_max", c.tolerances.radius_k_max}};
  return doc;
}

GeneratorFamily instantiate_family(const ScenarioConfig& c, std::size_t n) {
  const DiscreteSpace space(n);
  GeneratorFamily family(space);
  for (const auto& g : c.generators) {
    PartialInjection map = std::visit(
        [&](const auto& k) -> PartialInjection {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, RotationSpec>) {
            const std::int64_t p =
                k.p ? *k.p
                    : static_cast<std::int64_t>(std::llround(*k.alpha * static_cast<double>(n)));
            return make_rotation(space, p);
          } else if constexpr (std::is_same_v<K, TableSpec>) {
            return make_table(space, k.pairs);
          } else if constexpr (std::is_same_v<K, RestrictSpec>) {
            const CellSet s = k.cells ? CellSet::of(space, *k.cells)
                                      : CellSet::interval(space, k.interval->first,
                                                          k.interval->second);
            return restrict(family.find(k.base), s);
          } else {
            return make_interval_exchange(space, k.cuts, k.order);
          }
        },
        g.kind);
    try {
      family.add(g.name, std::move(map));
    } catch (const Error& e) {
      fail("generator '" + g.name + "': " + e.what());
    }
  }
  return family;
}

OperatorExpr instantiate(const ScenarioConfig& c, std::size_t n) {
  GeneratorFamily family = instantiate_family(c, n);
  const DiscreteSpace space = family.space();
  std::vector<OperatorExpr::Term> terms;
  for (const auto& t : c.op) {
    const auto it = std::find_if(c.functions.begin(), c.functions.end(),
                                 [&](const FunctionSpec& f) { return f.name == t.function; });
    if (it == c.functions.end()) fail("unknown function '" + t.function + "'");
    CellFunction f = std::visit(
        [&](const auto& k) -> CellFunction {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, ConstantFn>) {
            return CellFunction::constant(space, k.value);
          } else if constexpr (std::is_same_v<K, TableFn>) {
            return CellFunction(space, k.values);
          } else if constexpr (std::is_same_v<K, FourierFn>) {
            return CellFunction::fourier_mode(space, k.k, k.scale);
          } else if constexpr (std::is_same_v<K, PolynomialFn>) {
            return CellFunction::polynomial(space, k.coeffs);
          } else {
            return CellFunction::step(space, k.cuts, k.values);
          }
        },
        it->kind);
    terms.push_back({std::move(f), t.generator});
  }
  return OperatorExpr(std::move(family), std::move(terms));
}

}  // namespace fkdet
