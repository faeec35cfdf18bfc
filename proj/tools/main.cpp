// causal-fuse: batch front end for the model library. Every command prints
// one JSON report to stdout; exit codes are 0 for a positive verdict, 1 for
// a negative or undefined one, 2 for input errors, 3 for a blown budget.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfuse/combine.hpp"
#include "cfuse/complexity.hpp"
#include "cfuse/dsl.hpp"
#include "cfuse/explain.hpp"
#include "cfuse/qbf.hpp"
#include "cfuse/weighting.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cfuse;

namespace {

// Input problems that should end the run with exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

json diag_json(const Diagnostic& d) {
  return {{"rule", d.rule}, {"variable", d.variable}, {"detail", d.detail},
          {"line", d.line}, {"col", d.col}};
}

json value_json(const Value& v) {
  if (v.is_int()) return v.as_int();
  if (v.is_bool()) return v.as_bool();
  return v.to_string();
}

json context_json(const Context& u) {
  json obj = json::object();
  for (const auto& [name, v] : u.entries()) obj[name] = value_json(v);
  return obj;
}

Value parse_value_text(const std::string& text) {
  if (text.empty()) throw InputError("empty value");
  if (text == "true") return Value::boolean(true);
  if (text == "false") return Value::boolean(false);
  size_t digits = text[0] == '-' ? 1 : 0;
  if (digits < text.size() &&
      std::all_of(text.begin() + digits, text.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    try {
      return Value::integer(std::stoll(text));
    } catch (...) {
      throw InputError("integer value out of range: '" + text + "'");
    }
  }
  if (valid_identifier(text)) return Value::symbol(text);
  throw InputError("cannot read value '" + text + "'");
}

Context parse_context_arg(const std::string& arg) {
  Context u;
  if (arg.empty()) return u;
  std::istringstream in(arg);
  std::string item;
  while (std::getline(in, item, ',')) {
    size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw InputError("context entries look like name=value, got '" + item + "'");
    u.set(item.substr(0, eq), parse_value_text(item.substr(eq + 1)));
  }
  return u;
}

// Parses a model file; any diagnostic at all makes the file unusable as an
// input to the other commands (validate has its own, laxer flow).
CausalModel load_model(const std::string& path) {
  ParseResult r = parse_model(read_file(path));
  if (!r.ok()) {
    std::string msg = "'" + path + "' rejected";
    for (const Diagnostic& d : r.diagnostics) msg += "\n  " + d.to_string();
    throw InputError(msg);
  }
  return *std::move(r.model);
}

const char* combine_kind_name(CombineError::Kind k) {
  switch (k) {
    case CombineError::Kind::Incompatible: return "incompatible";
    case CombineError::Kind::CyclicCombination: return "cyclic-combination";
    case CombineError::Kind::RangeClosureFailure: return "range-closure-failure";
    case CombineError::Kind::NotLeastUpperBound: return "not-least-upper-bound";
    case CombineError::Kind::BudgetExceeded: return "budget-exceeded";
  }
  return "unknown";
}

json combine_error_json(const CombineError& e) {
  json obj = {{"kind", combine_kind_name(e.kind)}, {"message", e.to_string()}};
  if (!e.variable.empty()) obj["variable"] = e.variable;
  if (!e.model_id.empty()) obj["model"] = e.model_id;
  if (!e.parent.empty()) obj["parent"] = e.parent;
  return obj;
}

json witness_json(const ExplanationWitness& w) {
  json entries = json::array();
  for (const auto& e : w.entries) {
    json iv = json::array();
    for (const Value& v : e.intervention) iv.push_back(value_json(v));
    entries.push_back({{"intervention", iv},
                       {"observed", value_json(e.observed)},
                       {"context", context_json(e.context)}});
  }
  return {{"target", w.target}, {"intervened", w.intervened}, {"entries", entries}};
}

json complexity_json(const ComplexityResult& r) {
  json witness = json::array();
  for (const auto& [id, ctx] : r.witness)
    witness.push_back({{"model", id}, {"context", context_json(ctx)}});
  json obj = {{"cardinality", r.cardinality}, {"witness", witness}};
  if (!r.direction.empty()) {
    json dir = json::object();
    for (const auto& [var, id] : r.direction) dir[var] = id;
    obj["direction"] = dir;
  }
  return obj;
}

int emit(const json& report, int code) {
  std::cout << report.dump(2) << "\n";
  return code;
}

// ---- command handlers -----------------------------------------------------

int cmd_validate(const std::string& path) {
  json report = {{"command", "validate"}, {"model", path}};
  ParseResult r = parse_model(read_file(path));
  json diags = json::array();
  for (const Diagnostic& d : r.diagnostics) diags.push_back(diag_json(d));
  report["diagnostics"] = diags;
  if (!r.model) {
    report["verdict"] = "unparsed";
    return emit(report, 2);
  }
  report["id"] = r.model->id();
  report["verdict"] = r.diagnostics.empty() ? "valid" : "invalid";
  return emit(report, r.diagnostics.empty() ? 0 : 1);
}

int cmd_solve(const std::string& path, const std::string& context_arg) {
  CausalModel m = load_model(path);
  Context u = parse_context_arg(context_arg);
  auto solution = m.solve(u);
  json assignments = json::object();
  for (const auto& [name, v] : solution) assignments[name] = value_json(v);
  json report = {{"command", "solve"},
                 {"model", m.id()},
                 {"context", context_json(u)},
                 {"assignments", assignments}};
  return emit(report, 0);
}

int cmd_query(const std::string& path, const std::string& context_arg,
              const std::string& formula_arg) {
  CausalModel m = load_model(path);
  Context u = parse_context_arg(context_arg);
  std::string text = fs::exists(formula_arg) ? read_file(formula_arg) : formula_arg;
  CausalFormula phi = parse_formula(text, m);
  bool verdict = m.satisfies(u, phi);
  json report = {{"command", "query"},
                 {"model", m.id()},
                 {"context", context_json(u)},
                 {"formula", text},
                 {"verdict", verdict}};
  return emit(report, verdict ? 0 : 1);
}

int cmd_explain(const std::string& p1, const std::string& p2, const std::string& var,
                bool want_witness) {
  CausalModel m1 = load_model(p1);
  CausalModel m2 = load_model(p2);
  ExplanationWitness w;
  bool verdict = can_explain(m1, m2, var, want_witness ? &w : nullptr);
  json report = {{"command", "explain"},
                 {"explainer", m1.id()},
                 {"explained", m2.id()},
                 {"variable", var},
                 {"verdict", verdict}};
  if (want_witness && verdict) report["witness"] = witness_json(w);
  return emit(report, verdict ? 0 : 1);
}

int cmd_compatible(const std::string& p1, const std::string& p2) {
  CausalModel m1 = load_model(p1);
  CausalModel m2 = load_model(p2);
  json shared = json::array();
  bool verdict = true;
  for (const std::string& name : m1.variable_names()) {
    if (!m2.has_variable(name)) continue;
    bool d12 = can_explain(m1, m2, name);
    bool d21 = can_explain(m2, m1, name);
    if (!d12 && !d21) verdict = false;
    shared.push_back({{"variable", name},
                      {"first_explains_second", d12},
                      {"second_explains_first", d21}});
  }
  json report = {{"command", "compatible"},
                 {"first", m1.id()},
                 {"second", m2.id()},
                 {"shared", shared},
                 {"verdict", verdict}};
  return emit(report, verdict ? 0 : 1);
}

int cmd_combine(const std::string& p1, const std::string& p2, bool prime,
                const std::string& out_path) {
  CausalModel m1 = load_model(p1);
  CausalModel m2 = load_model(p2);
  CombineOutcome outcome = prime ? combine_prime(m1, m2) : combine(m1, m2);
  json report = {{"command", "combine"},
                 {"first", m1.id()},
                 {"second", m2.id()},
                 {"operator", prime ? "prime" : "lub"}};
  if (const auto* err = std::get_if<CombineError>(&outcome)) {
    report["verdict"] = "undefined";
    report["error"] = combine_error_json(*err);
    return emit(report, err->kind == CombineError::Kind::BudgetExceeded ? 3 : 1);
  }
  const CombinedModel& c = std::get<CombinedModel>(outcome);
  report["verdict"] = "defined";
  report["id"] = c.model.id();
  json prov = json::object();
  for (const auto& [var, src] : c.provenance) prov[var] = src;
  report["provenance"] = prov;
  std::string text = serialize_model(c.model);
  if (!out_path.empty()) {
    write_file(out_path, text);
    report["output"] = out_path;
  } else {
    report["model_text"] = text;
  }
  return emit(report, 0);
}

int cmd_complexity(const std::string& p1, const std::string& p2, const std::string& var) {
  CausalModel m1 = load_model(p1);
  CausalModel m2 = load_model(p2);
  json report = {{"command", "complexity"}, {"first", m1.id()}, {"second", m2.id()}};
  std::optional<ComplexityResult> r;
  if (!var.empty()) {
    report["variable"] = var;
    r = explanation_complexity(m1, m2, var);
  } else {
    r = combination_complexity(m1, m2);
  }
  if (!r) {
    report["verdict"] = "undefined";
    return emit(report, 1);
  }
  report["verdict"] = "defined";
  report["complexity"] = complexity_json(*r);
  return emit(report, 0);
}

std::string index_set_text(const IndexSet& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out;
}

int cmd_weigh(const std::string& manifest_path) {
  PanelManifest pm = parse_manifest(read_file(manifest_path));
  fs::path base = fs::path(manifest_path).parent_path();
  std::vector<ExpertInput> inputs;
  std::vector<double> priors;
  json panel = json::array();
  for (const ManifestEntry& e : pm.models) {
    fs::path p = fs::path(e.path).is_absolute() ? fs::path(e.path) : base / e.path;
    CausalModel m = load_model(p.string());
    panel.push_back({{"index", inputs.size() + 1}, {"id", m.id()}, {"prior", e.prior}});
    inputs.push_back({std::move(m), e.prior});
    priors.push_back(e.prior);
  }
  json report = {{"command", "weigh"},
                 {"manifest", manifest_path},
                 {"panel", panel},
                 {"rule", pm.rule}};

  CompatReport compat = enumerate_compat(inputs);
  ScoreTable table;
  try {
    if (pm.rule == "plain") {
      table = score_plain(compat, priors);
    } else if (pm.rule == "threshold") {
      if (!pm.cap) throw InputError("threshold rule needs a cap line in the manifest");
      table = score_threshold(compat, priors, *pm.cap);
    } else if (pm.rule == "inverse") {
      table = score_inverse(compat, priors);
    } else {
      table = score_exponential(compat, priors);
    }
  } catch (const DegenerateNormalization& e) {
    report["verdict"] = "degenerate";
    report["detail"] = e.what();
    return emit(report, 1);
  } catch (const std::invalid_argument& e) {
    // A compatible set whose own combination is undefined has no complexity,
    // which the complexity-sensitive rules cannot score.
    report["verdict"] = "undefined";
    report["detail"] = e.what();
    return emit(report, 1);
  }

  json sets = json::array();
  for (const IndexSet& s : compat.compat) {
    json entry = {{"members", s}, {"score", table.scores.at(s)}};
    auto c = compat.combined.find(s);
    if (c != compat.combined.end()) entry["combined"] = c->second.model.id();
    auto mu = compat.complexity.find(s);
    if (mu != compat.complexity.end()) entry["complexity"] = mu->second;
    auto singles = compat.single_complexities.find(s);
    if (singles != compat.single_complexities.end())
      entry["single_complexities"] = singles->second;
    entry["label"] = index_set_text(s);
    sets.push_back(std::move(entry));
  }
  report["sets"] = sets;
  report["normalization"] = table.normalization;
  report["verdict"] = "scored";
  return emit(report, 0);
}

int cmd_qbf(const std::string& path, const std::string& reduce_dir) {
  CQBF q = parse_cqbf(read_file(path));
  bool truth = qbf_brute_force(q);
  Reduction red = reduce_cqbf(q);
  DecisionStats stats = decide_can_explain(red.m1, red.m2, red.target);
  json report = {{"command", "qbf"},
                 {"file", path},
                 {"universal", q.universal},
                 {"existential", q.existential},
                 {"verdict", truth},
                 {"reduction", {{"target", red.target},
                                {"can_explain", stats.verdict},
                                {"agrees", stats.verdict == truth},
                                {"interventions_examined", stats.interventions_examined},
                                {"contexts_examined", stats.contexts_examined}}}};
  if (!reduce_dir.empty()) {
    fs::create_directories(reduce_dir);
    fs::path dir(reduce_dir);
    write_file((dir / "m1.cmf").string(), serialize_model(red.m1));
    write_file((dir / "m2.cmf").string(), serialize_model(red.m2));
    report["reduction"]["written"] = {(dir / "m1.cmf").string(), (dir / "m2.cmf").string()};
  }
  return emit(report, truth ? 0 : 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal models with focus: explain, combine, weigh"};
  app.require_subcommand(1);

  uint64_t max_enum = 1000000;
  app.add_option("--max-enum", max_enum, "global enumeration budget")
      ->envname("CAUSAL_FUSE_MAX_ENUM");
  uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for randomized subcommands");

  std::string v_path;
  auto* c_validate = app.add_subcommand("validate", "parse a model and report diagnostics");
  c_validate->add_option("model", v_path, "model file")->required();

  std::string s_path, s_context;
  auto* c_solve = app.add_subcommand("solve", "evaluate all equations under a context");
  c_solve->add_option("model", s_path, "model file")->required();
  c_solve->add_option("--context", s_context, "exogenous assignment k=v,...");

  std::string q_path, q_context, q_formula;
  auto* c_query = app.add_subcommand("query", "check an interventional formula");
  c_query->add_option("model", q_path, "model file")->required();
  c_query->add_option("--context", q_context, "exogenous assignment k=v,...");
  c_query->add_option("--formula", q_formula, "formula file or literal text")->required();

  std::string e_p1, e_p2, e_var;
  bool e_witness = false;
  auto* c_explain = app.add_subcommand("explain", "can the first model explain the second");
  c_explain->add_option("first", e_p1, "explaining model file")->required();
  c_explain->add_option("second", e_p2, "explained model file")->required();
  c_explain->add_option("--var", e_var, "target variable")->required();
  c_explain->add_flag("--witness", e_witness, "embed the explaining contexts");

  std::string k_p1, k_p2;
  auto* c_compat = app.add_subcommand("compatible", "explainable in some direction everywhere");
  c_compat->add_option("first", k_p1, "model file")->required();
  c_compat->add_option("second", k_p2, "model file")->required();

  std::string b_p1, b_p2, b_out;
  bool b_prime = false;
  auto* c_combine = app.add_subcommand("combine", "merge two models");
  c_combine->add_option("first", b_p1, "model file")->required();
  c_combine->add_option("second", b_p2, "model file")->required();
  c_combine->add_flag("--prime", b_prime, "skip the least-upper-bound requirement");
  c_combine->add_option("-o,--output", b_out, "write the combined model here");

  std::string x_p1, x_p2, x_var;
  auto* c_complexity = app.add_subcommand("complexity", "minimum explaining context sets");
  c_complexity->add_option("first", x_p1, "model file")->required();
  c_complexity->add_option("second", x_p2, "model file")->required();
  c_complexity->add_option("--var", x_var, "explanation complexity at this variable only");

  std::string w_path;
  auto* c_weigh = app.add_subcommand("weigh", "score the compatible subsets of a panel");
  c_weigh->add_option("manifest", w_path, "panel manifest file")->required();

  std::string f_path, f_reduce;
  auto* c_qbf = app.add_subcommand("qbf", "evaluate a forall/exists boolean formula");
  c_qbf->add_option("file", f_path, "formula file")->required();
  c_qbf->add_option("--reduce", f_reduce, "write the model-pair reduction into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  set_default_enum_limit(max_enum);
  (void)seed;  // reserved for randomized subcommands

  try {
    if (*c_validate) return cmd_validate(v_path);
    if (*c_solve) return cmd_solve(s_path, s_context);
    if (*c_query) return cmd_query(q_path, q_context, q_formula);
    if (*c_explain) return cmd_explain(e_p1, e_p2, e_var, e_witness);
    if (*c_compat) return cmd_compatible(k_p1, k_p2);
    if (*c_combine) return cmd_combine(b_p1, b_p2, b_prime, b_out);
    if (*c_complexity) return cmd_complexity(x_p1, x_p2, x_var);
    if (*c_weigh) return cmd_weigh(w_path);
    if (*c_qbf) return cmd_qbf(f_path, f_reduce);
  } catch (const BudgetExceeded& e) {
    std::cout << json{{"verdict", "budget-exceeded"}, {"error", e.what()}}.dump(2) << "\n";
    return 3;
  } catch (const ParseError& e) {
    json err = {{"verdict", "error"},
                {"error", e.what()},
                {"line", e.line},
                {"col", e.col}};
    std::cout << err.dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << json{{"verdict", "error"}, {"error", e.what()}}.dump(2) << "\n";
    return 2;
  }
  return 2;
}
