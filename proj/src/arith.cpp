#include "svsyn/arith.hpp"
#include "svsyn/diagnostic.hpp"

#include <algorithm>
#include <deque>

namespace svsyn
{

const char* arch_name( adder_arch a )
{
  switch ( a )
  {
  case adder_arch::ripple: return "ripple";
  case adder_arch::sklansky: return "sklansky";
  case adder_arch::kogge_stone: return "kogge_stone";
  case adder_arch::brent_kung: return "brent_kung";
  }
  return "?";
}

std::optional<adder_arch> parse_arch( const std::string& s )
{
  for ( auto a : { adder_arch::ripple, adder_arch::sklansky, adder_arch::kogge_stone, adder_arch::brent_kung } )
    if ( s == arch_name( a ) )
      return a;
  return std::nullopt;
}

/* adders */

namespace
{

struct gp
{
  lit g, p;
};

/* (g, p) o (g', p'): the left pair covers the more significant span */
gp combine( aig& g, const gp& hi, const gp& lo )
{
  return { g.add_or( hi.g, g.add_and( hi.p, lo.g ) ), g.add_and( hi.p, lo.p ) };
}

} // namespace

adder_out build_adder( aig& g, const word& a, const word& b, lit cin, adder_arch arch )
{
  if ( a.size() != b.size() )
    throw internal_error( "adder operands differ in width" );
  const uint32_t w = static_cast<uint32_t>( a.size() );
  adder_out r;
  if ( w == 0 )
  {
    r.cout = cin;
    return r;
  }
  if ( arch == adder_arch::ripple )
  {
    lit c = cin;
    for ( uint32_t i = 0; i < w; ++i )
    {
      lit p = g.add_xor( a[i], b[i] );
      r.sum.push_back( g.add_xor( p, c ) );
      c = g.add_or( g.add_and( a[i], b[i] ), g.add_and( p, c ) );
    }
    r.cout = c;
    r.stages = w;
    return r;
  }

  std::vector<lit> p( w );
  std::vector<gp> x( w );
  for ( uint32_t i = 0; i < w; ++i )
  {
    p[i] = g.add_xor( a[i], b[i] );
    x[i] = { g.add_and( a[i], b[i] ), p[i] };
  }
  // carry-in folded into position 0
  x[0].g = g.add_or( x[0].g, g.add_and( p[0], cin ) );

  uint32_t stages = 0;
  switch ( arch )
  {
  case adder_arch::kogge_stone:
    for ( uint32_t d = 1; d < w; d <<= 1 )
    {
      auto y = x;
      for ( uint32_t i = d; i < w; ++i )
        y[i] = combine( g, x[i], x[i - d] );
      x = std::move( y );
      ++stages;
    }
    break;
  case adder_arch::sklansky:
    for ( uint32_t l = 0; ( 1u << l ) < w; ++l )
    {
      auto y = x;
      for ( uint32_t i = 0; i < w; ++i )
        if ( ( i >> l ) & 1 )
        {
          uint32_t j = ( ( i >> l ) << l ) - 1;
          y[i] = combine( g, x[i], x[j] );
        }
      x = std::move( y );
      ++stages;
    }
    break;
  case adder_arch::brent_kung:
  {
    uint32_t d = 1;
    for ( ; d < w; d <<= 1 )
    {
      bool any = false;
      for ( uint32_t i = 2 * d - 1; i < w; i += 2 * d )
      {
        x[i] = combine( g, x[i], x[i - d] );
        any = true;
      }
      stages += any ? 1 : 0;
    }
    for ( d >>= 1; d >= 1; d >>= 1 )
    {
      bool any = false;
      for ( uint32_t i = 3 * d - 1; i < w; i += 2 * d )
      {
        x[i] = combine( g, x[i], x[i - d] );
        any = true;
      }
      stages += any ? 1 : 0;
    }
    break;
  }
  case adder_arch::ripple:
    break;
  }
  for ( uint32_t i = 0; i < w; ++i )
    r.sum.push_back( g.add_xor( p[i], i == 0 ? cin : x[i - 1].g ) );
  r.cout = x[w - 1].g;
  r.stages = stages;
  return r;
}

/* carry-save tree */

uint32_t dadda_stages( uint32_t n )
{
  uint32_t d = 2, s = 0;
  while ( d < n )
  {
    d = d * 3 / 2;
    ++s;
  }
  return s;
}

csa_out build_csa_tree( aig& g, const std::vector<addend>& addends, uint32_t width )
{
  std::vector<std::deque<lit>> cols( width );
  for ( const auto& ad : addends )
    for ( uint32_t i = 0; i < ad.bits.size(); ++i )
    {
      uint32_t pos = ad.offset + i;
      if ( pos < width && ad.bits[i] != lit_false )
        cols[pos].push_back( ad.bits[i] );
    }
  size_t maxh = 0;
  for ( const auto& c : cols )
    maxh = std::max( maxh, c.size() );
  std::vector<uint32_t> ds{ 2 };
  while ( ds.back() < maxh )
    ds.push_back( ds.back() * 3 / 2 );

  csa_out r;
  for ( size_t j = ds.size() - 1; j-- > 0; )
  {
    uint32_t d = ds[j];
    ++r.stages;
    for ( uint32_t i = 0; i < width; ++i )
    {
      auto& c = cols[i];
      std::vector<lit> out; // sums produced in this stage stay in the column
      while ( c.size() + out.size() > d )
      {
        size_t excess = c.size() + out.size() - d;
        auto take = [&]() {
          lit v;
          if ( !c.empty() )
          {
            v = c.front();
            c.pop_front();
          }
          else
          {
            v = out.front();
            out.erase( out.begin() );
          }
          return v;
        };
        lit x = take();
        lit y = take();
        lit carry;
        if ( excess >= 2 )
        {
          lit z = take();
          lit p = g.add_xor( x, y );
          out.push_back( g.add_xor( p, z ) );
          carry = g.add_or( g.add_and( x, y ), g.add_and( p, z ) );
        }
        else
        {
          out.push_back( g.add_xor( x, y ) );
          carry = g.add_and( x, y );
        }
        if ( i + 1 < width )
          cols[i + 1].push_back( carry );
      }
      c.insert( c.end(), out.begin(), out.end() );
    }
  }
  for ( uint32_t i = 0; i < width; ++i )
  {
    r.sum.push_back( cols[i].size() > 0 ? cols[i][0] : lit_false );
    r.carry.push_back( cols[i].size() > 1 ? cols[i][1] : lit_false );
  }
  return r;
}

/* Booth radix-4 */

booth_out build_booth_multiplier( aig& g, const word& a, const word& b, bool is_signed, uint32_t width, adder_arch final_arch,
                                  const word* extra )
{
  const uint32_t wa = static_cast<uint32_t>( a.size() ), wb = static_cast<uint32_t>( b.size() );
  booth_out r;
  // A' : multiplicand as a signed (wa + 2)-bit value, room for 2A
  const uint32_t R = wa + 2;
  auto abit = [&]( int64_t i ) -> lit {
    if ( i < 0 )
      return lit_false;
    if ( i < wa )
      return a[i];
    return is_signed ? a[wa - 1] : lit_false;
  };
  // B' : multiplier extended by one bit
  auto bbit = [&]( int64_t i ) -> lit {
    if ( i < 0 )
      return lit_false;
    if ( i < wb )
      return b[i];
    return is_signed ? b[wb - 1] : lit_false;
  };
  r.rows = ( wb + 2 ) / 2;
  std::vector<addend> adds;
  bitvec k( width ); // sum of the constant sign corrections
  for ( uint32_t j = 0; j < r.rows; ++j )
  {
    lit b2 = bbit( 2 * j + 1 ), b1 = bbit( 2 * j ), b0 = bbit( int64_t( 2 * j ) - 1 );
    lit neg = b2;
    lit one = g.add_xor( b1, b0 );
    lit two = g.add_or( g.add_and( b2, g.add_and( lit_not( b1 ), lit_not( b0 ) ) ),
                        g.add_and( lit_not( b2 ), g.add_and( b1, b0 ) ) );
    word row;
    for ( uint32_t i = 0; i < R; ++i )
    {
      lit sel = g.add_or( g.add_and( one, abit( i ) ), g.add_and( two, abit( int64_t( i ) - 1 ) ) );
      row.push_back( g.add_xor( sel, neg ) );
    }
    // -s * 2^(R-1) = ~s * 2^(R-1) - 2^(R-1)
    row[R - 1] = lit_not( row[R - 1] );
    adds.push_back( { row, 2 * j } );
    adds.push_back( { { neg }, 2 * j } );
    uint64_t shift = R - 1 + 2 * j;
    if ( shift < width )
      k = k - bitvec( width, 1 ).shl( shift );
  }
  word kw;
  for ( uint32_t i = 0; i < width; ++i )
    kw.push_back( k.bit( i ) ? lit_true : lit_false );
  adds.push_back( { kw, 0 } );
  if ( extra )
    adds.push_back( { *extra, 0 } );
  auto t = build_csa_tree( g, adds, width );
  r.csa_stages = t.stages;
  r.product = build_adder( g, t.sum, t.carry, lit_false, final_arch ).sum;
  return r;
}

namespace
{

word add_port( aig& g, const std::string& name, uint32_t w )
{
  word v;
  for ( uint32_t i = 0; i < w; ++i )
    v.push_back( g.add_pi( bit_name( name, w, i ) ) );
  g.in_ports.push_back( { name, w } );
  return v;
}

void add_out( aig& g, const std::string& name, const word& v )
{
  for ( uint32_t i = 0; i < v.size(); ++i )
    g.add_po( v[i], bit_name( name, static_cast<uint32_t>( v.size() ), i ) );
  g.out_ports.push_back( { name, static_cast<uint32_t>( v.size() ) } );
}

} // namespace

aig gen_adder( uint32_t width, adder_arch arch, bool carry_in )
{
  aig g;
  auto a = add_port( g, "a", width );
  auto b = add_port( g, "b", width );
  lit cin = carry_in ? add_port( g, "cin", 1 )[0] : lit_false;
  auto r = build_adder( g, a, b, cin, arch );
  add_out( g, "s", r.sum );
  add_out( g, "cout", { r.cout } );
  return g;
}

aig gen_booth_multiplier( uint32_t wa, uint32_t wb, bool is_signed, adder_arch final_arch )
{
  aig g;
  auto a = add_port( g, "a", wa );
  auto b = add_port( g, "b", wb );
  auto r = build_booth_multiplier( g, a, b, is_signed, wa + wb, final_arch );
  add_out( g, "p", r.product );
  return g;
}

/* selection */

adder_arch arith_selection::arch_for( const wcell& c ) const
{
  auto it = overrides.find( c.name );
  return it == overrides.end() ? default_arch : it->second;
}

arch_policy arch_policy::parse( const std::string& s )
{
  arch_policy p;
  if ( s == "min_area" )
    p.k = kind::min_area;
  else if ( s == "min_delay" )
    p.k = kind::min_delay;
  else if ( s == "balanced" )
    p.k = kind::balanced;
  else if ( s.rfind( "balanced(", 0 ) == 0 && s.back() == ')' )
  {
    p.k = kind::balanced;
    auto num = s.substr( 9, s.size() - 10 );
    if ( num.empty() || num.size() > 6 || !std::all_of( num.begin(), num.end(), ::isdigit ) )
      throw user_error( "bad adder policy threshold in '" + s + "'" );
    p.threshold = static_cast<uint32_t>( std::stoul( num ) );
  }
  else
    throw user_error( "unknown adder policy '" + s + "' (expected min_area, min_delay or balanced(N))" );
  return p;
}

std::string arch_policy::text() const
{
  switch ( k )
  {
  case kind::min_area: return "min_area";
  case kind::min_delay: return "min_delay";
  case kind::balanced: return "balanced(" + std::to_string( threshold ) + ")";
  }
  return "?";
}

arith_selection select_arch( const word_netlist& wn, const arch_policy& policy )
{
  arith_selection s;
  switch ( policy.k )
  {
  case arch_policy::kind::min_area:
    s.default_arch = adder_arch::ripple;
    break;
  case arch_policy::kind::min_delay:
    s.default_arch = adder_arch::kogge_stone;
    break;
  case arch_policy::kind::balanced:
    s.default_arch = adder_arch::ripple;
    for ( const auto& c : wn.cells )
      if ( c.kind == wkind::add || c.kind == wkind::sub || c.kind == wkind::mul || c.kind == wkind::fma )
        s.overrides[c.name] = wn.width( c.out ) >= policy.threshold ? adder_arch::brent_kung : adder_arch::ripple;
    break;
  }
  return s;
}

/* fusion */

namespace
{

/* width without provably zero top bits (zero-extension by CONCAT) */
uint32_t significant_width( const word_netlist& wn, const std::vector<int32_t>& drv, uint32_t net )
{
  uint32_t w = wn.width( net );
  int32_t d = drv[net];
  if ( d < 0 )
    return w;
  const auto& c = wn.cells[d];
  if ( c.kind == wkind::const_ )
    return c.value.is_zero() ? 0 : w;
  if ( c.kind == wkind::concat && c.in.size() > 1 )
  {
    int32_t hd = drv[c.in[0]];
    if ( hd >= 0 && wn.cells[hd].kind == wkind::const_ && wn.cells[hd].value.is_zero() )
      return w - wn.width( c.in[0] );
  }
  return w;
}

} // namespace

uint32_t fuse_mac( word_netlist& wn, const arith_selection& sel )
{
  if ( !sel.fuse )
    return 0;
  auto drv = wn.drivers();
  auto fo = wn.fanouts();
  uint32_t fused = 0;
  for ( size_t ci = 0; ci < wn.cells.size(); ++ci )
  {
    if ( wn.cells[ci].kind != wkind::add )
      continue;
    for ( int side = 0; side < 2; ++side )
    {
      const auto& add = wn.cells[ci];
      uint32_t mnet = add.in[side], cnet = add.in[1 - side];
      int32_t md = drv[mnet];
      if ( md < 0 || wn.cells[md].kind != wkind::mul || fo[mnet] != 1 )
        continue;
      const auto& mul = wn.cells[md];
      if ( wn.width( mul.out ) != wn.width( add.out ) )
        continue;
      uint32_t wa = wn.width( mul.in[0] ), wb = wn.width( mul.in[1] );
      if ( significant_width( wn, drv, cnet ) > wa + wb )
        continue;
      std::vector<uint32_t> in = { mul.in[0], mul.in[1], cnet };
      bool sgn = mul.is_signed;
      auto& c = wn.cells[ci];
      c.kind = wkind::fma;
      c.in = in;
      c.is_signed = sgn;
      // the MUL is now dead; keep `fo` in sync for later candidates
      fo[mnet] = 0;
      ++fused;
      break;
    }
  }
  if ( fused )
    wn.sweep();
  return fused;
}

} // namespace svsyn
