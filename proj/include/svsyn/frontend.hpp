#pragma once

#include "svsyn/ast.hpp"
#include "svsyn/diagnostic.hpp"

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace svsyn
{

struct source_file
{
  std::string path;
  std::string text;
};

/*! \brief An ordered set of source files plus the design's top module. */
struct source_set
{
  std::vector<source_file> files;
  std::string top;
};

struct parse_result
{
  ast design;
  diagnostics diags;

  bool ok() const;
};

/*! \brief Parses one file. Syntax errors and constructs outside the supported
 * subset are reported as diagnostics; the returned design then holds the
 * modules parsed before the first error. */
parse_result parse_text( std::string_view text, const std::string& path = "<input>" );

/*! \brief Parses every file of the set, then checks cross-file rules:
 * duplicate module definitions and instances of undeclared modules. */
parse_result parse( const source_set& sources );

/*! \brief Module names in dependency order: instantiated modules come before
 * their instantiators, ties broken lexicographically. Throws user_error
 * naming the cycle (e.g. `a->b->a`) on cyclic instantiation. */
std::vector<std::string> dependency_order( const ast& design );

/*! \brief All instances of a module, including those nested in generate constructs. */
std::vector<const instance*> instances_of( const module_decl& m );

/*! \brief Concatenates all modules of the set into one normalized source text. */
std::string pickle( const source_set& sources );

enum class dialect
{
  systemverilog,
  verilog2005
};

struct emit_options
{
  dialect lang = dialect::systemverilog;
  /*! Names (per module) that must be declared `reg` in Verilog-2005 output. */
  std::function<bool( const std::string& module, const std::string& net )> is_reg;
};

std::string emit_module( const module_decl& m, const emit_options& opts = {} );
std::string emit( const ast& design, const emit_options& opts = {} );
std::string emit_expr( const expr& e );

/*! \brief Reads a JSON manifest `{"top": ..., "files": [...]}`; relative paths
 * resolve against the manifest's directory. */
source_set load_manifest( const std::string& path );

} // namespace svsyn
