#pragma once

#include "svsyn/bitvec.hpp"
#include "svsyn/diagnostic.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace svsyn
{

/* Expressions */

enum class expr_kind
{
  number,         // value, is_signed
  fill,           // '0 / '1 ; value holds the fill bit (width 1)
  ident,          // name
  unary,          // op, operands[0]
  binary,         // op, operands[0..1]
  ternary,        // operands: cond, then, else
  concat,         // operands, MSB first
  replicate,      // operands[0] = count, operands[1..] = items
  index,          // name[operands[0]]
  range_select,   // name[operands[0] : operands[1]]
  indexed_select, // name[operands[0] +: operands[1]]  (op is "+:" or "-:")
  call            // name is $clog2 / $signed / $unsigned
};

struct expr
{
  expr_kind kind = expr_kind::number;
  std::string op;
  std::string name;
  bitvec value;
  bool is_signed = false;
  std::vector<expr> operands;
  source_loc loc;

  bool operator==( const expr& ) const = default;

  static expr number( bitvec v, bool is_signed, source_loc loc = {} );
  static expr integer( int64_t v ); // 32-bit signed literal
  static expr ident( std::string name, source_loc loc = {} );
  static expr unary( std::string op, expr a, source_loc loc = {} );
  static expr binary( std::string op, expr a, expr b, source_loc loc = {} );
};

/* Types */

struct range
{
  expr msb;
  expr lsb;
  bool operator==( const range& ) const = default;
};

enum class type_keyword
{
  none, // implicit (e.g. `input a` or untyped parameter)
  logic,
  wire,
  reg,
  bit,
  int_,
  integer,
  named // user typedef; see data_type::type_name
};

struct data_type
{
  type_keyword keyword = type_keyword::none;
  std::string type_name;
  bool is_signed = false;
  std::optional<range> packed;
  bool operator==( const data_type& ) const = default;
};

/* Statements */

enum class stmt_kind
{
  block,
  blocking,
  nonblocking,
  if_,
  case_,
  null
};

struct stmt;

struct case_item
{
  std::vector<expr> labels; // empty means default
  std::vector<stmt> body;   // exactly one statement
  bool operator==( const case_item& ) const;
};

struct stmt
{
  stmt_kind kind = stmt_kind::null;
  expr lhs;            // assignments
  expr rhs;            // assignments
  expr cond;           // if / case subject
  std::vector<stmt> body; // block: statements; if: then [, else]
  std::vector<case_item> items;
  std::string qualifier; // "", "unique", "priority"
  source_loc loc;
  bool operator==( const stmt& ) const = default;
};

inline bool case_item::operator==( const case_item& o ) const
{
  return labels == o.labels && body == o.body;
}

/* Module items */

enum class port_dir
{
  input,
  output,
  inout
};

struct port_decl
{
  port_dir dir = port_dir::input;
  data_type type;
  std::string name;
  source_loc loc;
  bool operator==( const port_decl& ) const = default;
};

struct net_decl
{
  data_type type;
  std::string name;
  std::optional<expr> init;
  source_loc loc;
  bool operator==( const net_decl& ) const = default;
};

struct param_decl
{
  bool is_local = false;
  data_type type;
  std::string name;
  std::optional<expr> value;
  source_loc loc;
  bool operator==( const param_decl& ) const = default;
};

struct enum_member
{
  std::string name;
  std::optional<expr> value;
  bool operator==( const enum_member& ) const = default;
};

struct typedef_decl
{
  std::string name;
  data_type base;
  bool is_enum = false;
  std::vector<enum_member> members;
  source_loc loc;
  bool operator==( const typedef_decl& ) const = default;
};

struct genvar_decl
{
  std::vector<std::string> names;
  source_loc loc;
  bool operator==( const genvar_decl& ) const = default;
};

struct continuous_assign
{
  expr lhs;
  expr rhs;
  source_loc loc;
  bool operator==( const continuous_assign& ) const = default;
};

enum class always_kind
{
  comb,     // always_comb
  star,     // always @* / always @(*)
  ff,       // always_ff @(edge clk)
  edge      // always @(edge clk)
};

struct always_block
{
  always_kind kind = always_kind::comb;
  bool posedge = true;
  std::string clock;
  stmt body;
  source_loc loc;
  bool operator==( const always_block& ) const = default;
};

struct named_binding
{
  std::string name; // empty for positional
  std::optional<expr> value;
  bool operator==( const named_binding& ) const = default;
};

struct instance
{
  std::string module;
  std::vector<named_binding> params;
  std::string name;
  std::vector<named_binding> ports;
  source_loc loc;
  bool operator==( const instance& ) const = default;
};

struct module_item;

struct gen_for
{
  std::string genvar;
  bool declares_genvar = false; // `for (genvar i = ...)`
  expr init;
  expr cond;
  expr step; // right-hand side of `genvar = step`
  std::string label;
  std::vector<module_item> body;
  source_loc loc;
  bool operator==( const gen_for& ) const;
};

struct gen_if
{
  expr cond;
  std::vector<module_item> then_items;
  std::vector<module_item> else_items;
  bool has_else = false;
  std::string then_label;
  std::string else_label;
  source_loc loc;
  bool operator==( const gen_if& ) const;
};

struct module_item
{
  std::variant<net_decl, param_decl, typedef_decl, genvar_decl, continuous_assign, always_block, instance, gen_for, gen_if> node;
  bool operator==( const module_item& ) const = default;
};

inline bool gen_for::operator==( const gen_for& o ) const
{
  return genvar == o.genvar && declares_genvar == o.declares_genvar && init == o.init && cond == o.cond && step == o.step &&
         label == o.label && body == o.body;
}

inline bool gen_if::operator==( const gen_if& o ) const
{
  return cond == o.cond && then_items == o.then_items && else_items == o.else_items && has_else == o.has_else &&
         then_label == o.then_label && else_label == o.else_label;
}

struct module_decl
{
  std::string name;
  std::vector<param_decl> params; // header parameter port list
  std::vector<port_decl> ports;
  std::vector<module_item> items;
  source_loc loc;
  bool operator==( const module_decl& ) const = default;
};

/*! \brief A parsed design: an ordered list of module definitions. */
struct ast
{
  std::vector<module_decl> modules;

  const module_decl* find( std::string_view name ) const;
  bool operator==( const ast& ) const = default;
};

} // namespace svsyn
