#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "nullcore/error.hpp"
#include "nullcore/io.hpp"

namespace nullcore::testing {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program data_program(const std::string& name) {
  return parse_program(read_text(std::string(NULLCORE_DATA_DIR) + "/" + name));
}

inline Program program(std::string_view text) { return parse_program(text); }

inline Interpretation facts(std::string_view text) { return parse_facts(text); }

inline Rule rule(std::string_view text) { return parse_program(text).rules[0]; }

inline Query query(std::string_view text) { return parse_program(text).queries.at(0); }

inline Atom atom(std::string_view text) { return *parse_facts(std::string(text) + " .").begin(); }

// Code of the nullcore::Error thrown by f, if any.
template <class F>
std::optional<ErrorCode> thrown(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Term c(std::string_view name) { return Term::constant(name); }
inline Term v(std::string_view name) { return Term::variable(name); }
inline Term n(NullId id) { return Term::null(id); }

}  // namespace nullcore::testing
