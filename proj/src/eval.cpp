#include "svsyn/eval.hpp"

#include <algorithm>

namespace svsyn
{

decl_range name_resolver::range_of( const std::string& name ) const
{
  auto t = type_of( name );
  return { static_cast<int64_t>( t ? t->width : 1 ) - 1, 0 };
}

bool is_arith_binary( const std::string& op )
{
  return op == "+" || op == "-" || op == "*" || op == "/" || op == "%" || op == "&" || op == "|" || op == "^" || op == "~^";
}

bool is_compare_binary( const std::string& op )
{
  return op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

bool is_shift_binary( const std::string& op )
{
  return op == "<<" || op == ">>" || op == "<<<" || op == ">>>" || op == "**";
}

uint32_t clog2( const bitvec& v )
{
  if ( v.is_zero() )
    return 0;
  bitvec m = v - bitvec( v.width(), 1 );
  return m.min_bits_unsigned();
}

select_span range_span( const decl_range& rg, int64_t a, int64_t b )
{
  int64_t pa = rg.position( a ), pb = rg.position( b );
  int64_t lo = std::min( pa, pb ), hi = std::max( pa, pb );
  return { lo, static_cast<uint32_t>( hi - lo + 1 ) };
}

select_span indexed_span( const decl_range& rg, int64_t base, uint32_t w, bool up )
{
  int64_t i0 = up ? base : base - static_cast<int64_t>( w ) + 1;
  int64_t i1 = i0 + static_cast<int64_t>( w ) - 1;
  return { std::min( rg.position( i0 ), rg.position( i1 ) ), w };
}

namespace
{

[[noreturn]] void fail( const expr& e, const std::string& msg )
{
  throw user_error( e.loc, msg, "expr" );
}

uint32_t check_width( const expr& e, int64_t w )
{
  if ( w <= 0 || w > max_width )
    fail( e, "expression width " + std::to_string( w ) + " out of range" );
  return static_cast<uint32_t>( w );
}

vtype ident_type( const expr& e, const name_resolver& r )
{
  auto t = r.type_of( e.name );
  if ( !t )
    fail( e, "undeclared identifier '" + e.name + "'" );
  return *t;
}

bitvec ident_value( const expr& e, const name_resolver& r )
{
  auto v = r.value_of( e.name );
  if ( !v )
    fail( e, "'" + e.name + "' is not a constant" );
  return *v;
}

uint32_t indexed_width( const expr& e, const name_resolver& r )
{
  return check_width( e, eval_int( e.operands[1], r ) );
}

} // namespace

vtype self_type( const expr& e, const name_resolver& r )
{
  switch ( e.kind )
  {
  case expr_kind::number:
    return { e.value.width(), e.is_signed };
  case expr_kind::fill:
    return { 1, false };
  case expr_kind::ident:
    return ident_type( e, r );
  case expr_kind::unary:
    if ( e.op == "+" || e.op == "-" || e.op == "~" )
      return self_type( e.operands[0], r );
    return { 1, false };
  case expr_kind::binary:
  {
    const auto& op = e.op;
    if ( op == "&&" || op == "||" || is_compare_binary( op ) )
      return { 1, false };
    auto a = self_type( e.operands[0], r );
    if ( is_shift_binary( op ) )
      return a;
    if ( is_arith_binary( op ) )
    {
      auto b = self_type( e.operands[1], r );
      return { std::max( a.width, b.width ), a.is_signed && b.is_signed };
    }
    fail( e, "unknown operator '" + op + "'" );
  }
  case expr_kind::ternary:
  {
    auto a = self_type( e.operands[1], r ), b = self_type( e.operands[2], r );
    return { std::max( a.width, b.width ), a.is_signed && b.is_signed };
  }
  case expr_kind::concat:
  {
    int64_t w = 0;
    for ( const auto& o : e.operands )
      w += self_type( o, r ).width;
    return { check_width( e, w ), false };
  }
  case expr_kind::replicate:
  {
    int64_t n = eval_int( e.operands[0], r );
    if ( n <= 0 )
      fail( e, "replication count must be positive" );
    int64_t w = 0;
    for ( size_t i = 1; i < e.operands.size(); ++i )
      w += self_type( e.operands[i], r ).width;
    if ( n > max_width )
      fail( e, "replication count too large" );
    return { check_width( e, n * w ), false };
  }
  case expr_kind::index:
    ident_type( { expr::ident( e.name, e.loc ) }, r );
    return { 1, false };
  case expr_kind::range_select:
  {
    ident_type( { expr::ident( e.name, e.loc ) }, r );
    auto sp = range_span( r.range_of( e.name ), eval_int( e.operands[0], r ), eval_int( e.operands[1], r ) );
    return { check_width( e, sp.width ), false };
  }
  case expr_kind::indexed_select:
    ident_type( { expr::ident( e.name, e.loc ) }, r );
    return { indexed_width( e, r ), false };
  case expr_kind::call:
    if ( e.name == "$clog2" )
      return { 32, true };
    return { self_type( e.operands[0], r ).width, e.name == "$signed" };
  }
  fail( e, "bad expression" );
}

bitvec eval_self( const expr& e, const name_resolver& r )
{
  auto t = self_type( e, r );
  return eval_context( e, r, t.width, t.is_signed );
}

bitvec eval_assign( const expr& e, const name_resolver& r, uint32_t width )
{
  auto t = self_type( e, r );
  auto v = eval_context( e, r, std::max( t.width, width ), t.is_signed );
  return v.resized( width, t.is_signed );
}

int64_t eval_int( const expr& e, const name_resolver& r )
{
  auto t = self_type( e, r );
  return to_index( eval_context( e, r, t.width, t.is_signed ), t.is_signed );
}

namespace
{

bitvec power( const bitvec& base, const bitvec& ex, bool ex_signed, bool s )
{
  uint32_t w = base.width();
  if ( ex_signed && ex.msb() )
  {
    if ( base == bitvec( w, 1 ) )
      return base;
    if ( s && base.is_ones() )
      return ex.bit( 0 ) ? base : bitvec( w, 1 );
    return bitvec( w );
  }
  bitvec result( w, 1 ), b = base;
  for ( uint32_t i = 0; i < ex.width(); ++i )
  {
    if ( ex.bit( i ) )
      result = result * b;
    b = b * b;
  }
  return result;
}

uint64_t shift_amount( const bitvec& v )
{
  return v.fits_u64() ? v.to_u64() : UINT64_MAX;
}

bitvec bool_vec( bool b, uint32_t w )
{
  return bitvec( w, b ? 1 : 0 );
}

} // namespace

bitvec eval_context( const expr& e, const name_resolver& r, uint32_t w, bool s )
{
  switch ( e.kind )
  {
  case expr_kind::number:
    return e.value.resized( w, s );
  case expr_kind::fill:
    return e.value.bit( 0 ) ? bitvec::ones( w ) : bitvec( w );
  case expr_kind::ident:
  {
    auto v = ident_value( e, r );
    return v.resized( w, s );
  }
  case expr_kind::unary:
  {
    const auto& op = e.op;
    if ( op == "+" )
      return eval_context( e.operands[0], r, w, s );
    if ( op == "-" )
      return eval_context( e.operands[0], r, w, s ).negated();
    if ( op == "~" )
      return ~eval_context( e.operands[0], r, w, s );
    auto v = eval_self( e.operands[0], r );
    bool b = false;
    if ( op == "!" )
      b = v.is_zero();
    else if ( op == "&" )
      b = v.is_ones();
    else if ( op == "|" )
      b = !v.is_zero();
    else if ( op == "^" )
      b = v.popcount() & 1;
    else if ( op == "~&" )
      b = !v.is_ones();
    else if ( op == "~|" )
      b = v.is_zero();
    else if ( op == "~^" )
      b = !( v.popcount() & 1 );
    else
      fail( e, "unknown operator '" + op + "'" );
    return bool_vec( b, w );
  }
  case expr_kind::binary:
  {
    const auto& op = e.op;
    if ( op == "&&" || op == "||" )
    {
      bool a = !eval_self( e.operands[0], r ).is_zero();
      bool b = !eval_self( e.operands[1], r ).is_zero();
      return bool_vec( op == "&&" ? ( a && b ) : ( a || b ), w );
    }
    if ( is_compare_binary( op ) )
    {
      auto ta = self_type( e.operands[0], r ), tb = self_type( e.operands[1], r );
      uint32_t cw = std::max( ta.width, tb.width );
      bool cs = ta.is_signed && tb.is_signed;
      auto a = eval_context( e.operands[0], r, cw, cs );
      auto b = eval_context( e.operands[1], r, cw, cs );
      bool res = false;
      if ( op == "==" || op == "===" )
        res = a == b;
      else if ( op == "!=" || op == "!==" )
        res = !( a == b );
      else if ( op == "<" )
        res = cs ? a.slt( b ) : a.ult( b );
      else if ( op == "<=" )
        res = !( cs ? b.slt( a ) : b.ult( a ) );
      else if ( op == ">" )
        res = cs ? b.slt( a ) : b.ult( a );
      else
        res = !( cs ? a.slt( b ) : a.ult( b ) );
      return bool_vec( res, w );
    }
    if ( is_shift_binary( op ) )
    {
      auto a = eval_context( e.operands[0], r, w, s );
      auto tb = self_type( e.operands[1], r );
      auto b = eval_context( e.operands[1], r, tb.width, tb.is_signed );
      if ( op == "**" )
        return power( a, b, tb.is_signed, s );
      uint64_t n = shift_amount( b );
      if ( op == "<<" || op == "<<<" )
        return a.shl( n );
      if ( op == ">>>" && s )
        return a.ashr( n );
      return a.lshr( n );
    }
    auto a = eval_context( e.operands[0], r, w, s );
    auto b = eval_context( e.operands[1], r, w, s );
    if ( op == "+" )
      return a + b;
    if ( op == "-" )
      return a - b;
    if ( op == "*" )
      return a * b;
    if ( op == "/" )
      return s ? a.sdiv( b ) : a.udiv( b );
    if ( op == "%" )
      return s ? a.srem( b ) : a.urem( b );
    if ( op == "&" )
      return a & b;
    if ( op == "|" )
      return a | b;
    if ( op == "^" )
      return a ^ b;
    if ( op == "~^" )
      return ~( a ^ b );
    fail( e, "unknown operator '" + op + "'" );
  }
  case expr_kind::ternary:
  {
    bool c = !eval_self( e.operands[0], r ).is_zero();
    return eval_context( e.operands[c ? 1 : 2], r, w, s );
  }
  case expr_kind::concat:
  case expr_kind::replicate:
  {
    size_t first = e.kind == expr_kind::replicate ? 1 : 0;
    bitvec acc;
    bool empty = true;
    for ( size_t i = first; i < e.operands.size(); ++i )
    {
      auto v = eval_self( e.operands[i], r );
      acc = empty ? v : bitvec::concat( acc, v );
      empty = false;
    }
    if ( e.kind == expr_kind::replicate )
    {
      int64_t n = eval_int( e.operands[0], r );
      bitvec one = acc;
      for ( int64_t i = 1; i < n; ++i )
        acc = bitvec::concat( acc, one );
    }
    return acc.resized( w, s );
  }
  case expr_kind::index:
  {
    auto v = ident_value( expr::ident( e.name, e.loc ), r );
    auto ti = self_type( e.operands[0], r );
    auto idx = eval_context( e.operands[0], r, ti.width, ti.is_signed );
    int64_t pos = r.range_of( e.name ).position( to_index( idx, ti.is_signed ) );
    return v.slice( pos, 1 ).resized( w, s );
  }
  case expr_kind::range_select:
  {
    auto v = ident_value( expr::ident( e.name, e.loc ), r );
    auto sp = range_span( r.range_of( e.name ), eval_int( e.operands[0], r ), eval_int( e.operands[1], r ) );
    return v.slice( sp.low, sp.width ).resized( w, s );
  }
  case expr_kind::indexed_select:
  {
    auto v = ident_value( expr::ident( e.name, e.loc ), r );
    uint32_t width = indexed_width( e, r );
    auto sp = indexed_span( r.range_of( e.name ), eval_int( e.operands[0], r ), width, e.op == "+:" );
    return v.slice( sp.low, sp.width ).resized( w, s );
  }
  case expr_kind::call:
  {
    if ( e.name == "$clog2" )
      return bitvec( 32, clog2( eval_self( e.operands[0], r ) ) ).resized( w, s );
    return eval_self( e.operands[0], r ).resized( w, s );
  }
  }
  fail( e, "bad expression" );
}

} // namespace svsyn
