#pragma once

#include <catch2/catch_amalgamated.hpp>
#include <fstream>
#include <sstream>
#include <string>

#include "cfuse/dsl.hpp"

inline std::string fixture_path(const std::string& name) {
  return std::string(CFUSE_FIXTURE_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline cfuse::CausalModel load_fixture(const std::string& name) {
  cfuse::ParseResult r = cfuse::parse_model(read_text(fixture_path(name)));
  INFO("fixture " << name);
  for (const auto& d : r.diagnostics) UNSCOPED_INFO(d.to_string());
  REQUIRE(r.ok());
  return *std::move(r.model);
}

// Shorthand for inline models in tests; fails loudly on any diagnostic.
inline cfuse::CausalModel model_from(const std::string& text) {
  cfuse::ParseResult r = cfuse::parse_model(text);
  for (const auto& d : r.diagnostics) UNSCOPED_INFO(d.to_string());
  REQUIRE(r.ok());
  return *std::move(r.model);
}
