#pragma once

#include "svsyn/ast.hpp"
#include "svsyn/bitvec.hpp"

#include <optional>
#include <string>
#include <utility>

namespace svsyn
{

/*! \brief Width and signedness of an expression or declaration. */
struct vtype
{
  uint32_t width = 1;
  bool is_signed = false;
  bool operator==( const vtype& ) const = default;
};

/*! \brief Declared packed range of a name; `msb >= lsb` is a descending range. */
struct decl_range
{
  int64_t msb = 0;
  int64_t lsb = 0;

  uint32_t width() const { return static_cast<uint32_t>( ( msb >= lsb ? msb - lsb : lsb - msb ) + 1 ); }
  /*! \brief Bit position (0 = LSB) of a declared index. */
  int64_t position( int64_t index ) const { return msb >= lsb ? index - lsb : lsb - index; }
};

/*! \brief Identifier lookup for sizing and evaluation. */
class name_resolver
{
public:
  virtual ~name_resolver() = default;

  /*! \brief Type of an identifier, nullopt if undeclared. */
  virtual std::optional<vtype> type_of( const std::string& name ) const = 0;
  /*! \brief Current value of an identifier, nullopt if not known (non-constant in constant contexts). */
  virtual std::optional<bitvec> value_of( const std::string& name ) const = 0;
  /*! \brief Declared range; defaults to `[width-1:0]`. */
  virtual decl_range range_of( const std::string& name ) const;
};

/*! \brief Widest vector the evaluator accepts. */
inline constexpr uint32_t max_width = 1u << 16;

/*! \brief Self-determined type of `e` (Verilog sizing rules). */
vtype self_type( const expr& e, const name_resolver& r );

/*! \brief Self-determined value of `e`. */
bitvec eval_self( const expr& e, const name_resolver& r );

/*! \brief Value of `e` evaluated as the right-hand side of an assignment to
 * `width` bits: the context width is max(self width, width); the result is then
 * truncated or extended according to the expression's signedness. */
bitvec eval_assign( const expr& e, const name_resolver& r, uint32_t width );

/*! \brief Evaluates `e` in a context of width `w` (>= self width) and signedness `s`. */
bitvec eval_context( const expr& e, const name_resolver& r, uint32_t w, bool s );

/*! \brief Self-determined value as an integer (saturating), e.g. for ranges and indices. */
int64_t eval_int( const expr& e, const name_resolver& r );

/*! \brief ceil(log2(v)) with $clog2(0) = 0. */
uint32_t clog2( const bitvec& v );

/*! \brief Bit span [low, low + width) addressed by a select expression on a name with range `rg`. */
struct select_span
{
  int64_t low = 0;
  uint32_t width = 1;
};

/*! \brief Span of a constant range select `name[a:b]`. */
select_span range_span( const decl_range& rg, int64_t a, int64_t b );
/*! \brief Span of an indexed select `name[base +: w]` / `name[base -: w]`. */
select_span indexed_span( const decl_range& rg, int64_t base, uint32_t w, bool up );

/*! \brief True if the operator's operands are context-determined and share the result width. */
bool is_arith_binary( const std::string& op );
bool is_compare_binary( const std::string& op );
bool is_shift_binary( const std::string& op );

} // namespace svsyn
