/*
 * Copyright 2026 The attest authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace attest::schema {

// Declarative description of an RPC interface, the input to the schema
// generator. Names are kept in snake_case as declared; the generator
// applies the target framework's casing conventions on emission.

struct Method {
  std::string name;                    // snake_case; ordinal = declaration position
  std::vector<std::string> params;     // type names
  std::optional<std::string> returns;  // absent = unit (no arrow clause emitted)

  friend bool operator==(const Method&, const Method&) = default;
};

struct EnumDef {
  std::string name;
  std::vector<std::string> variants;  // ordinals = declaration positions

  friend bool operator==(const EnumDef&, const EnumDef&) = default;
};

struct InterfaceSpec {
  std::string interface_name;
  std::vector<Method> methods;
  std::vector<EnumDef> enums;

  friend bool operator==(const InterfaceSpec&, const InterfaceSpec&) = default;
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view name) {
  std::vector<std::string> words;
  std::string current;
  for (char ch : name) {
    if (ch == '_') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace detail

/// snake_case -> PascalCase (type names): store_response -> StoreResponse.
inline std::string pascal_case(std::string_view name) {
  std::string out;
  for (std::string& word : detail::split_words(name)) {
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    out += word;
  }
  return out;
}

/// snake_case -> camelCase (methods, variants): store_request -> storeRequest.
inline std::string camel_case(std::string_view name) {
  std::string out;
  bool first = true;
  for (std::string& word : detail::split_words(name)) {
    if (!first) {
      word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    }
    out += word;
    first = false;
  }
  return out;
}

/// A problem in an interface description; line/column are 1-based and 0
/// for errors not tied to a source position.
struct SchemaError {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;

  std::string to_string() const {
    if (line == 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }
};

/// Checks the InterfaceSpec invariants: unique method and enum names,
/// and every referenced type declared (`unit` is legal only as a return
/// type, where it is spelled by omitting the arrow clause).
inline std::optional<SchemaError> validate(const InterfaceSpec& spec) {
  auto err = [](std::string message) { return SchemaError{0, 0, std::move(message)}; };
  if (spec.interface_name.empty()) return err("interface has no name");

  std::set<std::string> enum_names;
  for (const EnumDef& e : spec.enums) {
    if (e.name.empty()) return err("enum has no name");
    if (e.name == "unit") return err("'unit' cannot be declared as an enum");
    if (!enum_names.insert(e.name).second) return err("duplicate enum name '" + e.name + "'");
    std::set<std::string> variant_names;
    for (const std::string& v : e.variants) {
      if (!variant_names.insert(v).second) {
        return err("duplicate variant '" + v + "' in enum '" + e.name + "'");
      }
    }
  }

  std::set<std::string> method_names;
  for (const Method& m : spec.methods) {
    if (m.name.empty()) return err("method has no name");
    if (!method_names.insert(m.name).second) {
      return err("duplicate method name '" + m.name + "'");
    }
    for (const std::string& p : m.params) {
      if (p == "unit") {
        return err("method '" + m.name + "': 'unit' is not usable as a parameter type");
      }
      if (!enum_names.count(p)) {
        return err("method '" + m.name + "' references undeclared type '" + p + "'");
      }
    }
    if (m.returns && !enum_names.count(*m.returns)) {
      return err("method '" + m.name + "' returns undeclared type '" + *m.returns + "'");
    }
  }
  return std::nullopt;
}

/**
 * Emits the RPC-framework schema text for an interface description: the
 * interface block with one line per method, then one struct block per
 * declared enum wrapping it as `enum V` with a single field `v`. Pure;
 * identical specs yield identical bytes. Throws std::invalid_argument
 * when the spec violates its invariants.
 *
 * `file_id` (hex digits, no 0x prefix) prepends the `@0x<hex>;` file ID
 * line real schema files need; by default none is emitted.
 */
inline std::string gen_capnp(const InterfaceSpec& spec,
                             const std::optional<std::string>& file_id = std::nullopt) {
  if (auto error = validate(spec)) throw std::invalid_argument(error->message);

  std::string out;
  if (file_id) {
    if (file_id->empty() || file_id->size() > 16 ||
        file_id->find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
      throw std::invalid_argument("file id must be 1-16 hex digits");
    }
    out += "@0x" + *file_id + ";\n\n";
  }

  out += "interface " + pascal_case(spec.interface_name) + " {\n";
  for (std::size_t i = 0; i < spec.methods.size(); ++i) {
    const Method& m = spec.methods[i];
    out += "  " + camel_case(m.name) + " @" + std::to_string(i) + "(";
    for (std::size_t p = 0; p < m.params.size(); ++p) {
      if (p > 0) out += ", ";
      out += "_" + std::to_string(p) + ":" + pascal_case(m.params[p]);
    }
    out += ")";
    if (m.returns) out += " -> " + pascal_case(*m.returns);
    out += ";\n";
  }
  out += "}\n";

  for (const EnumDef& e : spec.enums) {
    out += "\nstruct " + pascal_case(e.name) + " {\n";
    out += "  enum V {";
    for (std::size_t i = 0; i < e.variants.size(); ++i) {
      if (i > 0) out += " ";
      out += camel_case(e.variants[i]) + " @ " + std::to_string(i) + ";";
    }
    out += "}\n";
    out += "  v @ 0 : V;\n";
    out += "}\n";
  }
  return out;
}

/// The warehouse RPC interface: the two request methods with their
/// response types, the two actuator methods, and the three enums they
/// use.
inline InterfaceSpec hbw_interface_spec() {
  InterfaceSpec spec;
  spec.interface_name = "hbw_rpc";
  spec.methods = {
      Method{"store_request", {"color"}, "store_response"},
      Method{"retrieve_request", {"color"}, "retrieve_response"},
      Method{"store", {"color"}, std::nullopt},
      Method{"retrieve", {"color"}, std::nullopt},
  };
  spec.enums = {
      EnumDef{"retrieve_response", {"has_color", "does_not_have_color"}},
      EnumDef{"store_response", {"not_full", "is_full"}},
      EnumDef{"color", {"red", "white", "blue"}},
  };
  return spec;
}

// ---------------------------------------------------------------------------
// Interface description files. Line-oriented grammar:
//
//   interface <name>
//   method <snake_name>(<type>, ...) [-> <type>]
//   enum <name> { <variant>, <variant>, ... }
//
// '#' starts a comment. Exactly one interface line is required.

struct ParsedInterface {
  std::optional<InterfaceSpec> spec;
  std::optional<SchemaError> error;

  bool ok() const { return spec.has_value(); }
};

namespace detail {

/// Cursor over one line, tracking the 1-based column for diagnostics.
class LineCursor {
 public:
  LineCursor(const std::string& text, std::size_t lineno) : text_(text), lineno_(lineno) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  std::size_t column() const { return pos_ + 1; }
  std::size_t line() const { return lineno_; }

  /// Longest run of identifier characters at the cursor; empty if none.
  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  bool consume(char ch) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool consume(std::string_view literal) {
    skip_space();
    if (text_.compare(pos_, literal.size(), literal) == 0) {
      pos_ += literal.size();
      return true;
    }
    return false;
  }

 private:
  const std::string& text_;
  std::size_t lineno_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParsedInterface parse_interface(std::istream& in) {
  ParsedInterface out;
  InterfaceSpec spec;
  bool saw_interface = false;

  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const detail::LineCursor& cur, std::string message) {
    out.error = SchemaError{cur.line(), cur.column(), std::move(message)};
    return out;
  };

  while (std::getline(in, line)) {
    ++lineno;
    detail::LineCursor cur(line, lineno);
    if (cur.at_end()) continue;

    std::string keyword = cur.identifier();
    if (keyword == "interface") {
      std::string name = cur.identifier();
      if (name.empty()) return fail(cur, "expected interface name");
      if (saw_interface) return fail(cur, "duplicate interface declaration");
      if (!cur.at_end()) return fail(cur, "trailing tokens after interface name");
      spec.interface_name = name;
      saw_interface = true;
    } else if (keyword == "method") {
      Method m;
      m.name = cur.identifier();
      if (m.name.empty()) return fail(cur, "expected method name");
      if (!cur.consume('(')) return fail(cur, "expected '(' after method name");
      if (!cur.consume(')')) {
        while (true) {
          std::string type = cur.identifier();
          if (type.empty()) return fail(cur, "expected parameter type");
          m.params.push_back(type);
          if (cur.consume(')')) break;
          if (!cur.consume(',')) return fail(cur, "expected ',' or ')' in parameter list");
        }
      }
      if (cur.consume("->")) {
        std::string type = cur.identifier();
        if (type.empty()) return fail(cur, "expected return type after '->'");
        if (type != "unit") m.returns = type;
      }
      if (!cur.at_end()) return fail(cur, "trailing tokens after method declaration");
      spec.methods.push_back(std::move(m));
    } else if (keyword == "enum") {
      EnumDef e;
      e.name = cur.identifier();
      if (e.name.empty()) return fail(cur, "expected enum name");
      if (!cur.consume('{')) return fail(cur, "expected '{' after enum name");
      if (!cur.consume('}')) {
        while (true) {
          std::string variant = cur.identifier();
          if (variant.empty()) return fail(cur, "expected variant name");
          e.variants.push_back(variant);
          if (cur.consume('}')) break;
          if (!cur.consume(',')) return fail(cur, "expected ',' or '}' in variant list");
        }
      }
      if (!cur.at_end()) return fail(cur, "trailing tokens after enum declaration");
      spec.enums.push_back(std::move(e));
    } else {
      return fail(cur, "unknown declaration '" + keyword + "'");
    }
  }

  if (!saw_interface) {
    out.error = SchemaError{0, 0, "missing interface declaration"};
    return out;
  }
  if (auto error = validate(spec)) {
    out.error = error;
    return out;
  }
  out.spec = std::move(spec);
  return out;
}

inline ParsedInterface parse_interface_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_interface(in);
}

inline ParsedInterface load_interface_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    ParsedInterface out;
    out.error = SchemaError{0, 0, "cannot open '" + path.string() + "'"};
    return out;
  }
  return parse_interface(in);
}

/// Canonical text form of an interface description; parsing it back
/// yields a structurally equal spec (pretty-printing is idempotent).
inline std::string format_interface(const InterfaceSpec& spec) {
  std::string out = "interface " + spec.interface_name + "\n";
  for (const Method& m : spec.methods) {
    out += "method " + m.name + "(";
    for (std::size_t p = 0; p < m.params.size(); ++p) {
      if (p > 0) out += ", ";
      out += m.params[p];
    }
    out += ")";
    if (m.returns) out += " -> " + *m.returns;
    out += "\n";
  }
  for (const EnumDef& e : spec.enums) {
    out += "enum " + e.name + " { ";
    for (std::size_t i = 0; i < e.variants.size(); ++i) {
      if (i > 0) out += ", ";
      out += e.variants[i];
    }
    out += " }\n";
  }
  return out;
}

}  // namespace attest::schema
