#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfuse/model.hpp"
#include "cfuse/qbf.hpp"

namespace cfuse {

// Thrown by the formula, CQBF and manifest parsers; the model parser
// converts it into a diagnostic instead so fuzzed input never escapes.
struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

struct ParseResult {
  // Present when the text parsed and the model could be constructed; the
  // model may still carry validation diagnostics.
  std::optional<CausalModel> model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value() && diagnostics.empty(); }
};

// Parses the model grammar:
//   model IDENT { decl* }
//   decl = exogenous IDENT : range ;
//        | endogenous IDENT : range = expr ;
//        | focus IDENT <- { ident-list? } ;
//   range = { value (, value)* }   with integer or bare-symbol values
// A variable without a focus declaration is focused on its parents. Bare
// identifiers in equations resolve to declared variables first and become
// symbol literals otherwise; `#` starts a line comment.
ParseResult parse_model(const std::string& text);

// Canonical text: exogenous then endogenous declarations, each sorted by
// name, focus clauses explicit for every variable, LF line endings.
// Reparsing yields a semantically equal model, and semantically equal
// models serialize identically.
std::string serialize_model(const CausalModel& m);

// `[X <- 1, T <- Hot] (C = true & B = 2)`; names resolve against the model.
CausalFormula parse_formula(const std::string& text, const CausalModel& model);

// `forall x1 x2. exists y1. (x1 & y1) | (x2 ^ y1)`; either quantifier block
// may be omitted; the matrix allows only boolean connectives.
CQBF parse_cqbf(const std::string& text);

struct ManifestEntry {
  std::string path;
  double prior = 1.0;
};

struct PanelManifest {
  std::vector<ManifestEntry> models;
  std::string rule = "plain";
  std::optional<uint64_t> cap;  // threshold rule parameter
};

// Flat key-value lines: `model <path> prior <decimal>`, `rule <name>`,
// optional `cap <int>`.
PanelManifest parse_manifest(const std::string& text);

}  // namespace cfuse
