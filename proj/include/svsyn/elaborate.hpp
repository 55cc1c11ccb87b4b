#pragma once

#include "svsyn/ast.hpp"
#include "svsyn/bitvec.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace svsyn
{

/*! \brief A fully evaluated constant. */
struct param_value
{
  bitvec value;
  bool is_signed = false;
  bool operator==( const param_value& ) const = default;
};

/*! \brief Parameter bindings, name to evaluated constant. */
using param_env = std::map<std::string, param_value>;

/*! \brief Parses a constant such as `16`, `8'hff` or `-3` into a value. */
param_value parse_param_value( const std::string& text );

struct elab_options
{
  uint32_t max_loop_iterations = 65536;
  uint32_t max_depth = 64; // instance nesting
};

/*! \brief Module name plus the ordered resolved values of its overridable parameters. */
struct elab_instance_key
{
  std::string module;
  std::vector<std::pair<std::string, param_value>> params;

  bool operator==( const elab_instance_key& ) const = default;
  std::string text() const;
  /*! \brief Name of the emitted definition: the module name for the top and for
   * unparameterized modules, `<module>__P<hash8>` otherwise. */
  std::string uniquified_name() const;
};

struct elab_result
{
  ast design;          // modules in dependency order, top last among its dependencies
  std::string top;
  std::string map_json; // emitted name -> {module, params, names}
};

/*! \brief Resolves every parameter to a literal, unrolls generates and
 * uniquifies each used parameterization reachable from `top`. */
elab_result elaborate( const ast& design, const std::string& top, const param_env& overrides = {},
                       const elab_options& opts = {} );

/*! \brief Unrolls one generate item under constant bindings `env`. Identifiers not
 * bound in `env` and not declared inside the item are left untouched. */
std::vector<module_item> unroll( const module_item& item, const param_env& env, const elab_options& opts = {} );

/*! \brief Verilog-2005 text of an elaborated design. Throws internal_error if a
 * parameter or generate construct survived elaboration. */
std::string emit_verilog( const ast& elaborated );

/*! \brief Names assigned inside always blocks of a module (declared `reg` in Verilog-2005). */
std::vector<std::string> procedural_targets( const module_decl& m );

} // namespace svsyn
