#include "svsyn/word_netlist.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

namespace svsyn
{

const char* kind_name( wkind k )
{
  switch ( k )
  {
  case wkind::not_: return "not";
  case wkind::and_: return "and";
  case wkind::or_: return "or";
  case wkind::xor_: return "xor";
  case wkind::mux: return "mux";
  case wkind::shiftx: return "shiftx";
  case wkind::shl: return "shl";
  case wkind::shr: return "shr";
  case wkind::add: return "add";
  case wkind::sub: return "sub";
  case wkind::mul: return "mul";
  case wkind::fma: return "fma";
  case wkind::eq: return "eq";
  case wkind::lt: return "lt";
  case wkind::concat: return "concat";
  case wkind::slice: return "slice";
  case wkind::const_: return "const";
  case wkind::dff: return "dff";
  }
  return "?";
}

uint32_t word_netlist::add_net( uint32_t width )
{
  if ( width == 0 )
    throw internal_error( "zero-width net" );
  net_width.push_back( width );
  return static_cast<uint32_t>( net_width.size() - 1 );
}

uint32_t word_netlist::add_cell( wkind kind, std::vector<uint32_t> in, uint32_t width, bool is_signed, uint32_t offset )
{
  wcell c;
  c.kind = kind;
  c.in = std::move( in );
  c.out = add_net( width );
  c.is_signed = is_signed;
  c.offset = offset;
  c.name = std::string( "$" ) + kind_name( kind ) + "$" + std::to_string( next_name_++ );
  cells.push_back( std::move( c ) );
  return cells.back().out;
}

uint32_t word_netlist::add_const( const bitvec& v )
{
  uint32_t n = add_cell( wkind::const_, {}, v.width() );
  cells.back().value = v;
  return n;
}

uint32_t word_netlist::add_input( const std::string& name, uint32_t width )
{
  uint32_t n = add_net( width );
  inputs.push_back( { name, n } );
  return n;
}

void word_netlist::add_output( const std::string& name, uint32_t net )
{
  outputs.push_back( { name, net } );
}

std::vector<int32_t> word_netlist::drivers() const
{
  std::vector<int32_t> d( net_width.size(), -1 );
  for ( size_t i = 0; i < cells.size(); ++i )
    d[cells[i].out] = static_cast<int32_t>( i );
  return d;
}

std::vector<uint32_t> word_netlist::fanouts() const
{
  std::vector<uint32_t> f( net_width.size(), 0 );
  for ( const auto& c : cells )
    for ( auto n : c.in )
      ++f[n];
  for ( const auto& o : outputs )
    ++f[o.net];
  return f;
}

size_t word_netlist::count( wkind k ) const
{
  return std::count_if( cells.begin(), cells.end(), [k]( const wcell& c ) { return c.kind == k; } );
}

signature word_netlist::sig() const
{
  signature s;
  for ( const auto& p : inputs )
    s.inputs.push_back( { p.name, width( p.net ) } );
  for ( const auto& p : outputs )
    s.outputs.push_back( { p.name, width( p.net ) } );
  return s;
}

std::vector<uint32_t> word_netlist::topo_order() const
{
  auto drv = drivers();
  std::vector<uint32_t> pending( cells.size(), 0 );
  std::vector<std::vector<uint32_t>> users( cells.size() );
  for ( size_t i = 0; i < cells.size(); ++i )
  {
    if ( cells[i].kind == wkind::dff )
      continue;
    for ( auto n : cells[i].in )
      if ( drv[n] >= 0 && cells[drv[n]].kind != wkind::dff )
      {
        ++pending[i];
        users[drv[n]].push_back( static_cast<uint32_t>( i ) );
      }
  }
  std::vector<uint32_t> order;
  std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
  for ( size_t i = 0; i < cells.size(); ++i )
  {
    if ( cells[i].kind == wkind::dff )
      order.push_back( static_cast<uint32_t>( i ) );
    else if ( pending[i] == 0 )
      ready.push( static_cast<uint32_t>( i ) );
  }
  while ( !ready.empty() )
  {
    auto c = ready.top();
    ready.pop();
    order.push_back( c );
    for ( auto u : users[c] )
      if ( --pending[u] == 0 )
        ready.push( u );
  }
  if ( order.size() == cells.size() )
    return order;

  // report one cycle among the remaining cells
  std::vector<uint8_t> color( cells.size(), 0 );
  std::vector<uint32_t> stack;
  std::vector<uint32_t> cycle;
  auto dfs = [&]( auto&& self, uint32_t c ) -> bool {
    color[c] = 1;
    stack.push_back( c );
    for ( auto n : cells[c].in )
    {
      if ( drv[n] < 0 || cells[drv[n]].kind == wkind::dff )
        continue;
      auto p = static_cast<uint32_t>( drv[n] );
      if ( color[p] == 1 )
      {
        auto it = std::find( stack.begin(), stack.end(), p );
        cycle.assign( it, stack.end() );
        return true;
      }
      if ( color[p] == 0 && self( self, p ) )
        return true;
    }
    stack.pop_back();
    color[c] = 2;
    return false;
  };
  for ( size_t i = 0; i < cells.size() && cycle.empty(); ++i )
    if ( pending[i] && color[i] == 0 )
      dfs( dfs, static_cast<uint32_t>( i ) );
  std::string path;
  for ( auto it = cycle.rbegin(); it != cycle.rend(); ++it )
    path += cells[*it].name + " -> ";
  path += cycle.empty() ? "?" : cells[cycle.back()].name;
  throw user_error( "combinational cycle: " + path );
}

void word_netlist::validate() const
{
  std::vector<int32_t> seen( net_width.size(), -1 );
  for ( const auto& p : inputs )
    seen[p.net] = -2;
  auto bad = [&]( const wcell& c, const std::string& why ) {
    throw internal_error( "netlist cell " + c.name + ": " + why );
  };
  for ( size_t i = 0; i < cells.size(); ++i )
  {
    const auto& c = cells[i];
    if ( c.out >= net_width.size() )
      bad( c, "bad output net" );
    if ( seen[c.out] != -1 )
      bad( c, "net has multiple drivers" );
    seen[c.out] = static_cast<int32_t>( i );
    for ( auto n : c.in )
      if ( n >= net_width.size() )
        bad( c, "bad input net" );
    uint32_t w = width( c.out );
    auto in_w = [&]( size_t k ) { return width( c.in[k] ); };
    auto arity = [&]( size_t n ) {
      if ( c.in.size() != n )
        bad( c, "expected " + std::to_string( n ) + " inputs" );
    };
    switch ( c.kind )
    {
    case wkind::not_:
    case wkind::dff:
      arity( 1 );
      if ( in_w( 0 ) != w )
        bad( c, "width mismatch" );
      break;
    case wkind::and_:
    case wkind::or_:
    case wkind::xor_:
    case wkind::add:
    case wkind::sub:
      arity( 2 );
      if ( in_w( 0 ) != w || in_w( 1 ) != w )
        bad( c, "width mismatch" );
      break;
    case wkind::mux:
      arity( 3 );
      if ( in_w( 0 ) != 1 || in_w( 1 ) != w || in_w( 2 ) != w )
        bad( c, "width mismatch" );
      break;
    case wkind::shiftx:
      arity( 2 );
      break;
    case wkind::shl:
    case wkind::shr:
      arity( 2 );
      if ( in_w( 0 ) != w )
        bad( c, "width mismatch" );
      break;
    case wkind::mul:
      arity( 2 );
      if ( in_w( 0 ) > w || in_w( 1 ) > w )
        bad( c, "operand wider than result" );
      break;
    case wkind::fma:
      arity( 3 );
      if ( in_w( 0 ) > w || in_w( 1 ) > w || in_w( 2 ) != w )
        bad( c, "width mismatch" );
      break;
    case wkind::eq:
    case wkind::lt:
      arity( 2 );
      if ( w != 1 || in_w( 0 ) != in_w( 1 ) )
        bad( c, "width mismatch" );
      break;
    case wkind::concat:
    {
      if ( c.in.empty() )
        bad( c, "empty concatenation" );
      uint64_t s = 0;
      for ( size_t k = 0; k < c.in.size(); ++k )
        s += in_w( k );
      if ( s != w )
        bad( c, "width mismatch" );
      break;
    }
    case wkind::slice:
      arity( 1 );
      if ( uint64_t( c.offset ) + w > in_w( 0 ) )
        bad( c, "slice out of range" );
      break;
    case wkind::const_:
      arity( 0 );
      if ( c.value.width() != w )
        bad( c, "constant width mismatch" );
      break;
    }
  }
  for ( const auto& p : outputs )
    if ( p.net >= net_width.size() )
      throw internal_error( "output '" + p.name + "' has a bad net" );
}

void word_netlist::sweep()
{
  auto drv = drivers();
  std::vector<bool> live( cells.size(), false );
  std::vector<uint32_t> work;
  auto mark_net = [&]( uint32_t n ) {
    if ( drv[n] >= 0 && !live[drv[n]] )
    {
      live[drv[n]] = true;
      work.push_back( static_cast<uint32_t>( drv[n] ) );
    }
  };
  for ( const auto& o : outputs )
    mark_net( o.net );
  while ( !work.empty() )
  {
    auto c = work.back();
    work.pop_back();
    for ( auto n : cells[c].in )
      mark_net( n );
  }
  std::vector<wcell> kept;
  for ( size_t i = 0; i < cells.size(); ++i )
    if ( live[i] )
      kept.push_back( std::move( cells[i] ) );
  cells = std::move( kept );

  // renumber nets: inputs first, then cell outputs in cell order
  std::vector<uint32_t> remap( net_width.size(), UINT32_MAX );
  std::vector<uint32_t> widths;
  auto take = [&]( uint32_t n ) {
    if ( remap[n] == UINT32_MAX )
    {
      remap[n] = static_cast<uint32_t>( widths.size() );
      widths.push_back( net_width[n] );
    }
  };
  for ( const auto& p : inputs )
    take( p.net );
  for ( const auto& c : cells )
    take( c.out );
  for ( const auto& c : cells )
    for ( auto n : c.in )
      take( n ); // undriven internal nets
  for ( const auto& o : outputs )
    take( o.net );
  for ( auto& p : inputs )
    p.net = remap[p.net];
  for ( auto& o : outputs )
    o.net = remap[o.net];
  for ( auto& c : cells )
  {
    c.out = remap[c.out];
    for ( auto& n : c.in )
      n = remap[n];
  }
  net_width = std::move( widths );
}

void substitute_nets( word_netlist& wn, const std::vector<uint32_t>& map )
{
  auto rep = [&]( uint32_t n ) {
    while ( n < map.size() && map[n] != n )
      n = map[n];
    return n;
  };
  for ( auto& c : wn.cells )
    for ( auto& n : c.in )
      n = rep( n );
  for ( auto& o : wn.outputs )
    o.net = rep( o.net );
}

/* evaluation */

namespace
{

uint64_t amount( const bitvec& v )
{
  return v.fits_u64() ? v.to_u64() : UINT64_MAX;
}

} // namespace

bitvec eval_cell( const wcell& c, const std::vector<bitvec>& in, uint32_t w )
{
  switch ( c.kind )
  {
  case wkind::not_: return ~in[0];
  case wkind::and_: return in[0] & in[1];
  case wkind::or_: return in[0] | in[1];
  case wkind::xor_: return in[0] ^ in[1];
  case wkind::mux: return in[0].bit( 0 ) ? in[1] : in[2];
  case wkind::shiftx:
    if ( c.is_signed && in[1].msb() )
    {
      bitvec m = bitvec( in[1].width() ) - in[1];
      if ( !m.fits_u64() || m.to_u64() >= w )
        return bitvec( w );
      return in[0].resized( w, false ).shl( m.to_u64() );
    }
    return in[0].lshr( amount( in[1] ) ).resized( w, false );
  case wkind::shl: return in[0].shl( amount( in[1] ) );
  case wkind::shr: return c.is_signed ? in[0].ashr( amount( in[1] ) ) : in[0].lshr( amount( in[1] ) );
  case wkind::add: return in[0] + in[1];
  case wkind::sub: return in[0] - in[1];
  case wkind::mul: return in[0].resized( w, c.is_signed ) * in[1].resized( w, c.is_signed );
  case wkind::fma: return in[0].resized( w, c.is_signed ) * in[1].resized( w, c.is_signed ) + in[2];
  case wkind::eq: return bitvec( 1, in[0] == in[1] ? 1 : 0 );
  case wkind::lt: return bitvec( 1, ( c.is_signed ? in[0].slt( in[1] ) : in[0].ult( in[1] ) ) ? 1 : 0 );
  case wkind::concat:
  {
    bitvec acc = in[0];
    for ( size_t i = 1; i < in.size(); ++i )
      acc = bitvec::concat( acc, in[i] );
    return acc;
  }
  case wkind::slice: return in[0].slice( c.offset, w );
  case wkind::const_: return c.value;
  case wkind::dff: break;
  }
  throw internal_error( std::string( "cannot evaluate cell kind " ) + kind_name( c.kind ) );
}

/* constant folding */

namespace
{

class folder
{
public:
  explicit folder( word_netlist& wn ) : wn_( wn ) {}

  uint32_t run()
  {
    uint32_t total = 0;
    for ( ;; )
    {
      uint32_t changed = pass();
      total += changed;
      if ( !changed )
        break;
    }
    wn_.sweep();
    return total;
  }

private:
  word_netlist& wn_;
  std::vector<uint32_t> rep_;
  std::vector<int32_t> drv_;
  std::vector<bool> dead_;

  uint32_t find( uint32_t n )
  {
    while ( rep_[n] != n )
    {
      rep_[n] = rep_[rep_[n]];
      n = rep_[n];
    }
    return n;
  }

  const wcell* driver( uint32_t n ) const
  {
    if ( n >= drv_.size() || drv_[n] < 0 || dead_[drv_[n]] )
      return nullptr;
    return &wn_.cells[drv_[n]];
  }

  const bitvec* const_of( uint32_t n ) const
  {
    auto d = driver( n );
    return d && d->kind == wkind::const_ ? &d->value : nullptr;
  }

  uint32_t width( uint32_t n ) const { return wn_.width( n ); }

  uint32_t make( wkind k, std::vector<uint32_t> in, uint32_t w, bool s = false, uint32_t off = 0 )
  {
    uint32_t n = wn_.add_cell( k, std::move( in ), w, s, off );
    grow();
    return n;
  }

  uint32_t make_const( const bitvec& v )
  {
    uint32_t n = wn_.add_const( v );
    grow();
    return n;
  }

  uint32_t make_slice( uint32_t n, uint32_t off, uint32_t w )
  {
    if ( off == 0 && w == width( n ) )
      return n;
    return make( wkind::slice, { n }, w, false, off );
  }

  void grow()
  {
    while ( rep_.size() < wn_.net_width.size() )
      rep_.push_back( static_cast<uint32_t>( rep_.size() ) );
    drv_.resize( wn_.net_width.size(), -1 );
    dead_.resize( wn_.cells.size(), false );
    drv_[wn_.cells.back().out] = static_cast<int32_t>( wn_.cells.size() - 1 );
  }

  /* the cell's output now equals net `n`; the cell dies */
  void alias( uint32_t ci, uint32_t n )
  {
    dead_[ci] = true;
    rep_[wn_.cells[ci].out] = n;
  }

  /* bit-level view of a net through concat/slice/const: pairs (net, bit), net UINT32_MAX for constants */
  struct sbit
  {
    uint32_t net;
    uint32_t bit;
    bool operator==( const sbit& ) const = default;
  };

  void bits_of( uint32_t n, uint32_t lo, uint32_t w, std::vector<sbit>& out, uint32_t depth = 0 )
  {
    auto d = driver( n );
    if ( d && depth < 32 )
    {
      if ( d->kind == wkind::const_ )
      {
        for ( uint32_t i = 0; i < w; ++i )
          out.push_back( { UINT32_MAX, d->value.bit( lo + i ) ? 1u : 0u } );
        return;
      }
      if ( d->kind == wkind::slice )
        return bits_of( find( d->in[0] ), d->offset + lo, w, out, depth + 1 );
      if ( d->kind == wkind::concat )
      {
        uint32_t pos = 0;
        for ( auto it = d->in.rbegin(); it != d->in.rend(); ++it )
        {
          uint32_t pw = width( *it );
          uint32_t a = std::max( pos, lo ), b = std::min( pos + pw, lo + w );
          if ( a < b )
            bits_of( find( *it ), a - pos, b - a, out, depth + 1 );
          pos += pw;
        }
        return;
      }
    }
    for ( uint32_t i = 0; i < w; ++i )
      out.push_back( { n, lo + i } );
  }

  /* width of an operand after trimming extension bits */
  uint32_t narrowed( uint32_t n, bool is_signed )
  {
    std::vector<sbit> b;
    bits_of( n, 0, width( n ), b );
    uint32_t w = static_cast<uint32_t>( b.size() );
    const sbit zero{ UINT32_MAX, 0 };
    if ( !is_signed )
    {
      while ( w > 1 && b[w - 1] == zero )
        --w;
      return w;
    }
    while ( w > 1 && b[w - 1] == b[w - 2] )
      --w;
    // a zero top bit followed by more zeros: keep a single zero as sign
    return w;
  }

  bool fold_cell( uint32_t ci )
  {
    auto& c = wn_.cells[ci];
    for ( auto& n : c.in )
      n = find( n );
    if ( c.kind == wkind::const_ || c.kind == wkind::dff )
      return false;
    uint32_t w = width( c.out );

    // all-constant inputs
    {
      std::vector<bitvec> vals;
      bool all = true;
      for ( auto n : c.in )
      {
        auto v = const_of( n );
        if ( !v )
        {
          all = false;
          break;
        }
        vals.push_back( *v );
      }
      if ( all )
      {
        auto v = eval_cell( c, vals, w );
        alias( ci, make_const( v ) );
        return true;
      }
    }

    auto is_zero = [&]( uint32_t n ) { auto v = const_of( n ); return v && v->is_zero(); };
    auto is_ones = [&]( uint32_t n ) { auto v = const_of( n ); return v && v->is_ones(); };
    const auto in = c.in; // copies: `c` dangles once new cells are made
    const bool sgn = c.is_signed;

    switch ( c.kind )
    {
    case wkind::not_:
      if ( auto d = driver( in[0] ); d && d->kind == wkind::not_ )
      {
        alias( ci, find( d->in[0] ) );
        return true;
      }
      return false;
    case wkind::and_:
      if ( is_zero( in[0] ) || is_zero( in[1] ) )
        return alias( ci, make_const( bitvec( w ) ) ), true;
      if ( is_ones( in[0] ) || in[0] == in[1] )
        return alias( ci, in[1] ), true;
      if ( is_ones( in[1] ) )
        return alias( ci, in[0] ), true;
      return false;
    case wkind::or_:
      if ( is_ones( in[0] ) || is_ones( in[1] ) )
        return alias( ci, make_const( bitvec::ones( w ) ) ), true;
      if ( is_zero( in[0] ) || in[0] == in[1] )
        return alias( ci, in[1] ), true;
      if ( is_zero( in[1] ) )
        return alias( ci, in[0] ), true;
      return false;
    case wkind::xor_:
      if ( in[0] == in[1] )
        return alias( ci, make_const( bitvec( w ) ) ), true;
      if ( is_zero( in[0] ) )
        return alias( ci, in[1] ), true;
      if ( is_zero( in[1] ) )
        return alias( ci, in[0] ), true;
      return false;
    case wkind::mux:
      if ( auto s = const_of( in[0] ) )
        return alias( ci, s->bit( 0 ) ? in[1] : in[2] ), true;
      if ( in[1] == in[2] )
        return alias( ci, in[1] ), true;
      return false;
    case wkind::add:
      if ( is_zero( in[0] ) )
        return alias( ci, in[1] ), true;
      if ( is_zero( in[1] ) )
        return alias( ci, in[0] ), true;
      return false;
    case wkind::sub:
      if ( is_zero( in[1] ) )
        return alias( ci, in[0] ), true;
      return false;
    case wkind::eq:
      if ( in[0] == in[1] )
        return alias( ci, make_const( bitvec( 1, 1 ) ) ), true;
      return false;
    case wkind::shl:
    case wkind::shr:
    case wkind::shiftx:
    {
      auto k = const_of( in[1] );
      if ( !k )
        return false;
      bool neg = c.kind == wkind::shiftx && c.is_signed && k->msb();
      uint64_t n = k->fits_u64() ? k->to_u64() : UINT64_MAX;
      uint32_t wa = width( in[0] );
      if ( c.kind == wkind::shl )
      {
        if ( n >= w )
          return alias( ci, make_const( bitvec( w ) ) ), true;
        if ( n == 0 )
          return alias( ci, in[0] ), true;
        auto lo = make_const( bitvec( static_cast<uint32_t>( n ) ) );
        auto hi = make_slice( in[0], 0, w - static_cast<uint32_t>( n ) );
        return alias( ci, make( wkind::concat, { hi, lo }, w ) ), true;
      }
      if ( c.kind == wkind::shr && c.is_signed )
      {
        uint32_t s = static_cast<uint32_t>( std::min<uint64_t>( n, w - 1 ) );
        if ( s == 0 )
          return alias( ci, in[0] ), true;
        auto sign = make_slice( in[0], w - 1, 1 );
        std::vector<uint32_t> parts( s, sign );
        parts.push_back( make_slice( in[0], s, w - s ) );
        return alias( ci, make( wkind::concat, parts, w ) ), true;
      }
      if ( neg )
      {
        // y[k] = d[k - m]
        bitvec mv = bitvec( k->width() ) - *k;
        uint64_t m = mv.fits_u64() ? mv.to_u64() : UINT64_MAX;
        if ( m >= w )
          return alias( ci, make_const( bitvec( w ) ) ), true;
        uint32_t mm = static_cast<uint32_t>( m );
        uint32_t take = std::min( wa, w - mm );
        std::vector<uint32_t> parts;
        if ( w - mm > take )
          parts.push_back( make_const( bitvec( w - mm - take ) ) );
        parts.push_back( make_slice( in[0], 0, take ) );
        parts.push_back( make_const( bitvec( mm ) ) );
        return alias( ci, make( wkind::concat, parts, w ) ), true;
      }
      // logical right shift / shiftx: zero fill
      if ( n >= wa )
        return alias( ci, make_const( bitvec( w ) ) ), true;
      uint32_t avail = wa - static_cast<uint32_t>( n );
      uint32_t take = std::min( avail, w );
      auto body = make_slice( in[0], static_cast<uint32_t>( n ), take );
      if ( take == w )
        return alias( ci, body ), true;
      return alias( ci, make( wkind::concat, { make_const( bitvec( w - take ) ), body }, w ) ), true;
    }
    case wkind::mul:
    case wkind::fma:
    {
      if ( is_zero( in[0] ) || is_zero( in[1] ) )
      {
        if ( c.kind == wkind::mul )
          return alias( ci, make_const( bitvec( w ) ) ), true;
        return alias( ci, in[2] ), true;
      }
      bool changed = false;
      std::vector<uint32_t> nin = in;
      for ( int k = 0; k < 2; ++k )
      {
        uint32_t nw = narrowed( in[k], sgn );
        if ( nw < width( in[k] ) )
        {
          nin[k] = make_slice( in[k], 0, nw );
          changed = true;
        }
      }
      if ( changed )
        wn_.cells[ci].in = nin;
      return changed;
    }
    case wkind::slice:
    {
      if ( c.offset == 0 && w == width( in[0] ) )
        return alias( ci, in[0] ), true;
      auto d = driver( in[0] );
      if ( !d )
        return false;
      if ( d->kind == wkind::slice )
      {
        uint32_t off = d->offset + c.offset;
        uint32_t base = find( d->in[0] );
        return alias( ci, make_slice( base, off, w ) ), true;
      }
      if ( d->kind == wkind::concat )
      {
        // narrow to the covered operands
        std::vector<uint32_t> parts;
        uint32_t pos = 0, lo = c.offset;
        auto din = d->in;
        for ( auto it = din.rbegin(); it != din.rend(); ++it )
        {
          uint32_t pw = width( *it );
          uint32_t a = std::max( pos, lo ), b = std::min( pos + pw, lo + w );
          if ( a < b )
            parts.insert( parts.begin(), make_slice( find( *it ), a - pos, b - a ) );
          pos += pw;
        }
        if ( parts.size() == 1 )
          return alias( ci, parts[0] ), true;
        return alias( ci, make( wkind::concat, parts, w ) ), true;
      }
      return false;
    }
    case wkind::concat:
    {
      if ( in.size() == 1 )
        return alias( ci, in[0] ), true;
      // flatten nested concats, then merge constants and contiguous slices
      std::vector<uint32_t> flat;
      bool changed = false;
      for ( auto n : in )
      {
        auto d = driver( n );
        if ( d && d->kind == wkind::concat )
        {
          for ( auto m : d->in )
            flat.push_back( find( m ) );
          changed = true;
        }
        else
          flat.push_back( n );
      }
      std::vector<uint32_t> merged;
      for ( auto n : flat )
      {
        if ( !merged.empty() )
        {
          uint32_t prev = merged.back();
          auto pc = const_of( prev ), nc = const_of( n );
          if ( pc && nc )
          {
            merged.back() = make_const( bitvec::concat( *pc, *nc ) );
            changed = true;
            continue;
          }
          // prev is the high part; contiguous when prev starts right above n
          auto ps = slice_view( prev ), ns = slice_view( n );
          if ( ps.base == ns.base && ns.off + width( n ) == ps.off )
          {
            merged.back() = make_slice( ps.base, ns.off, width( n ) + width( prev ) );
            changed = true;
            continue;
          }
        }
        merged.push_back( n );
      }
      if ( merged.size() == 1 )
        return alias( ci, merged[0] ), true;
      if ( changed )
        wn_.cells[ci].in = merged;
      return changed;
    }
    default:
      return false;
    }
  }

  struct view
  {
    uint32_t base;
    uint32_t off;
  };

  view slice_view( uint32_t n )
  {
    auto d = driver( n );
    if ( d && d->kind == wkind::slice )
      return { find( d->in[0] ), d->offset };
    return { n, 0 };
  }

  uint32_t pass()
  {
    rep_.resize( wn_.net_width.size() );
    for ( size_t i = 0; i < rep_.size(); ++i )
      rep_[i] = static_cast<uint32_t>( i );
    drv_ = wn_.drivers();
    dead_.assign( wn_.cells.size(), false );
    uint32_t changed = 0;
    auto order = wn_.topo_order();
    for ( auto ci : order )
      if ( fold_cell( ci ) )
        ++changed;
    // cells created during the pass are folded in the next one
    for ( auto& c : wn_.cells )
      for ( auto& n : c.in )
        n = find( n );
    for ( auto& o : wn_.outputs )
      o.net = find( o.net );
    std::vector<wcell> kept;
    for ( size_t i = 0; i < wn_.cells.size(); ++i )
      if ( i >= dead_.size() || !dead_[i] )
        kept.push_back( std::move( wn_.cells[i] ) );
    wn_.cells = std::move( kept );
    wn_.sweep();
    return changed;
  }
};

} // namespace

uint32_t const_fold( word_netlist& wn )
{
  return folder( wn ).run();
}

/* Verilog dump */

std::string dump_verilog( const word_netlist& wn, const std::string& module_name )
{
  std::vector<std::string> name( wn.net_width.size() );
  std::vector<bool> is_input( wn.net_width.size(), false );
  for ( size_t i = 0; i < name.size(); ++i )
    name[i] = "n" + std::to_string( i );
  for ( const auto& p : wn.inputs )
  {
    name[p.net] = p.name;
    is_input[p.net] = true;
  }
  auto decl = []( uint32_t w ) { return w > 1 ? "[" + std::to_string( w - 1 ) + ":0] " : std::string(); };

  std::ostringstream os;
  os << "module " << module_name << " (";
  bool first = true;
  auto sep = [&]() {
    os << ( first ? "\n" : ",\n" );
    first = false;
  };
  if ( !wn.clock.empty() )
  {
    sep();
    os << "  input wire " << wn.clock;
  }
  for ( const auto& p : wn.inputs )
  {
    sep();
    os << "  input wire " << decl( wn.width( p.net ) ) << p.name;
  }
  for ( const auto& p : wn.outputs )
  {
    sep();
    os << "  output wire " << decl( wn.width( p.net ) ) << p.name;
  }
  os << "\n);\n";
  for ( const auto& c : wn.cells )
    os << "  " << ( c.kind == wkind::dff ? "reg " : "wire " ) << decl( wn.width( c.out ) ) << name[c.out] << ";\n";

  auto s = [&]( uint32_t n ) { return "$signed(" + name[n] + ")"; };
  auto op = [&]( const wcell& c, uint32_t k ) { return c.is_signed ? s( c.in[k] ) : name[c.in[k]]; };
  for ( const auto& c : wn.cells )
  {
    const auto& y = name[c.out];
    uint32_t w = wn.width( c.out );
    auto in = [&]( size_t k ) { return name[c.in[k]]; };
    os << "  // " << c.name << "\n";
    switch ( c.kind )
    {
    case wkind::dff:
      os << "  always @(" << ( wn.negedge ? "negedge " : "posedge " ) << wn.clock << ") " << y << " <= " << in( 0 ) << ";\n";
      continue;
    case wkind::not_: os << "  assign " << y << " = ~" << in( 0 ) << ";\n"; break;
    case wkind::and_: os << "  assign " << y << " = " << in( 0 ) << " & " << in( 1 ) << ";\n"; break;
    case wkind::or_: os << "  assign " << y << " = " << in( 0 ) << " | " << in( 1 ) << ";\n"; break;
    case wkind::xor_: os << "  assign " << y << " = " << in( 0 ) << " ^ " << in( 1 ) << ";\n"; break;
    case wkind::mux: os << "  assign " << y << " = " << in( 0 ) << " ? " << in( 1 ) << " : " << in( 2 ) << ";\n"; break;
    case wkind::shiftx:
      if ( c.is_signed )
        os << "  assign " << y << " = " << s( c.in[1] ) << " < 0 ? " << in( 0 ) << " << -" << in( 1 ) << " : " << in( 0 ) << " >> "
           << in( 1 ) << ";\n";
      else
        os << "  assign " << y << " = " << in( 0 ) << " >> " << in( 1 ) << ";\n";
      break;
    case wkind::shl: os << "  assign " << y << " = " << in( 0 ) << " << " << in( 1 ) << ";\n"; break;
    case wkind::shr:
      if ( c.is_signed )
        os << "  assign " << y << " = " << s( c.in[0] ) << " >>> " << in( 1 ) << ";\n";
      else
        os << "  assign " << y << " = " << in( 0 ) << " >> " << in( 1 ) << ";\n";
      break;
    case wkind::add: os << "  assign " << y << " = " << in( 0 ) << " + " << in( 1 ) << ";\n"; break;
    case wkind::sub: os << "  assign " << y << " = " << in( 0 ) << " - " << in( 1 ) << ";\n"; break;
    case wkind::mul: os << "  assign " << y << " = " << op( c, 0 ) << " * " << op( c, 1 ) << ";\n"; break;
    case wkind::fma:
      // the product is sized by the declared target first, then the addend joins
      os << "  wire " << decl( w ) << y << "_p;\n";
      os << "  assign " << y << "_p = " << op( c, 0 ) << " * " << op( c, 1 ) << ";\n";
      os << "  assign " << y << " = " << y << "_p + " << in( 2 ) << ";\n";
      break;
    case wkind::eq: os << "  assign " << y << " = " << in( 0 ) << " == " << in( 1 ) << ";\n"; break;
    case wkind::lt: os << "  assign " << y << " = " << op( c, 0 ) << " < " << op( c, 1 ) << ";\n"; break;
    case wkind::concat:
    {
      os << "  assign " << y << " = {";
      for ( size_t k = 0; k < c.in.size(); ++k )
        os << ( k ? ", " : "" ) << in( k );
      os << "};\n";
      break;
    }
    case wkind::slice:
      if ( wn.width( c.in[0] ) == 1 )
        os << "  assign " << y << " = " << in( 0 ) << ";\n";
      else
        os << "  assign " << y << " = " << in( 0 ) << "[" << c.offset + w - 1 << ":" << c.offset << "];\n";
      break;
    case wkind::const_: os << "  assign " << y << " = " << w << "'h" << c.value.to_hex() << ";\n"; break;
    }
  }
  for ( const auto& p : wn.outputs )
    os << "  assign " << p.name << " = " << name[p.net] << ";\n";
  os << "endmodule\n";
  return os.str();
}

/* simulation */

namespace
{

class word_sim : public scalar_model
{
public:
  explicit word_sim( const word_netlist& wn ) : wn_( wn ), sig_( wn.sig() ), order_( wn.topo_order() )
  {
    for ( const auto& c : wn_.cells )
      if ( c.kind == wkind::dff )
        dffs_.push_back( &c );
    reset();
  }

  const signature& sig() const override { return sig_; }
  bool is_sequential() const override { return !dffs_.empty(); }
  void reset() override
  {
    state_.assign( 64, {} );
    for ( auto& lane : state_ )
      for ( const auto* d : dffs_ )
        lane.push_back( bitvec( wn_.width( d->out ) ) );
  }

protected:
  std::vector<bitvec> step_lane( uint32_t lane, const std::vector<bitvec>& inputs ) override
  {
    std::vector<bitvec> val( wn_.net_width.size() );
    for ( size_t i = 0; i < wn_.net_width.size(); ++i )
      val[i] = bitvec( wn_.net_width[i] );
    for ( size_t i = 0; i < wn_.inputs.size(); ++i )
      val[wn_.inputs[i].net] = inputs[i];
    for ( size_t d = 0; d < dffs_.size(); ++d )
      val[dffs_[d]->out] = state_[lane][d];
    std::vector<bitvec> ops;
    for ( auto ci : order_ )
    {
      const auto& c = wn_.cells[ci];
      if ( c.kind == wkind::dff )
        continue;
      ops.clear();
      for ( auto n : c.in )
        ops.push_back( val[n] );
      val[c.out] = eval_cell( c, ops, wn_.width( c.out ) );
    }
    std::vector<bitvec> out;
    for ( const auto& o : wn_.outputs )
      out.push_back( val[o.net] );
    for ( size_t d = 0; d < dffs_.size(); ++d )
      state_[lane][d] = val[dffs_[d]->in[0]];
    return out;
  }

private:
  word_netlist wn_;
  signature sig_;
  std::vector<uint32_t> order_;
  std::vector<const wcell*> dffs_;
  std::vector<std::vector<bitvec>> state_;
};

} // namespace

std::unique_ptr<sim_model> make_word_simulator( const word_netlist& wn )
{
  return std::make_unique<word_sim>( wn );
}

} // namespace svsyn
