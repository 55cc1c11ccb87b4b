#include "svsyn/partselect.hpp"
#include "svsyn/diagnostic.hpp"

#include <algorithm>
#include <optional>

namespace svsyn
{

namespace
{

const wcell* driver_of( const word_netlist& wn, const std::vector<int32_t>& drv, uint32_t net )
{
  return drv[net] < 0 ? nullptr : &wn.cells[drv[net]];
}

std::optional<bitvec> const_net( const word_netlist& wn, const std::vector<int32_t>& drv, uint32_t net )
{
  auto c = driver_of( wn, drv, net );
  if ( c && c->kind == wkind::const_ )
    return c->value;
  return std::nullopt;
}

/* bits below which the value lives: strips zero-extension */
uint32_t significant_bits( const word_netlist& wn, const std::vector<int32_t>& drv, uint32_t net )
{
  uint32_t w = wn.width( net );
  auto c = driver_of( wn, drv, net );
  if ( !c )
    return w;
  if ( c->kind == wkind::const_ )
  {
    uint32_t s = w;
    while ( s > 0 && !c->value.bit( s - 1 ) )
      --s;
    return s;
  }
  if ( c->kind == wkind::concat && c->in.size() > 1 )
  {
    auto hi = const_net( wn, drv, c->in[0] );
    if ( hi && hi->is_zero() )
      return w - wn.width( c->in[0] );
  }
  return w;
}

uint32_t log2_ceil( uint64_t v )
{
  uint32_t l = 0;
  while ( ( uint64_t( 1 ) << l ) < v )
    ++l;
  return l;
}

struct shape
{
  uint32_t index_net;
  uint64_t stride;
};

std::optional<shape> stride_shape( const word_netlist& wn, const std::vector<int32_t>& drv, uint32_t shamt )
{
  auto c = driver_of( wn, drv, shamt );
  if ( !c )
    return std::nullopt;
  if ( c->kind == wkind::mul && !c->is_signed )
  {
    for ( int k = 0; k < 2; ++k )
    {
      auto v = const_net( wn, drv, c->in[k] );
      if ( v && !v->is_zero() && v->fits_u64() && v->to_u64() <= ( uint64_t( 1 ) << 24 ) )
        return shape{ c->in[1 - k], v->to_u64() };
    }
    return std::nullopt;
  }
  if ( c->kind == wkind::shl )
  {
    auto v = const_net( wn, drv, c->in[1] );
    if ( v && v->fits_u64() && v->to_u64() < 24 )
      return shape{ c->in[0], uint64_t( 1 ) << v->to_u64() };
    return std::nullopt;
  }
  if ( c->kind == wkind::concat && c->in.size() > 1 )
  {
    auto v = const_net( wn, drv, c->in.back() );
    if ( v && v->is_zero() && v->width() < 24 )
      return shape{ UINT32_MAX, uint64_t( 1 ) << v->width() }; // index is the rest of the concat
  }
  return std::nullopt;
}

} // namespace

std::vector<stride_match> detect_strides( const word_netlist& wn )
{
  auto drv = wn.drivers();
  std::vector<stride_match> out;
  for ( uint32_t ci = 0; ci < wn.cells.size(); ++ci )
  {
    const auto& c = wn.cells[ci];
    if ( c.kind != wkind::shiftx || c.is_signed )
      continue;
    auto s = stride_shape( wn, drv, c.in[1] );
    if ( !s )
      continue;
    stride_match m;
    m.cell = ci;
    m.stride = static_cast<uint32_t>( s->stride );
    m.block_width = wn.width( c.out );
    uint32_t wd = wn.width( c.in[0] );
    m.blocks = ( wd + m.stride - 1 ) / m.stride;

    uint32_t idx_bits = 0;
    if ( s->index_net == UINT32_MAX )
    {
      // {idx, k'b0}: the index is everything above the zero tail
      const auto& cc = *driver_of( wn, drv, c.in[1] );
      m.index_net = UINT32_MAX;
      uint32_t tail = wn.width( cc.in.back() );
      idx_bits = significant_bits( wn, drv, c.in[1] );
      idx_bits = idx_bits > tail ? idx_bits - tail : 0;
    }
    else
    {
      m.index_net = s->index_net;
      idx_bits = significant_bits( wn, drv, s->index_net );
    }
    // the amount must not wrap: (2^idx_bits - 1) * stride < 2^|shamt|
    uint32_t wsh = wn.width( c.in[1] );
    bool no_wrap = s->index_net == UINT32_MAX || wsh >= 63 ||
                   ( idx_bits < 40 && ( ( uint64_t( 1 ) << idx_bits ) - 1 ) * s->stride < ( uint64_t( 1 ) << wsh ) );
    m.rewritable = m.block_width <= m.stride && no_wrap && idx_bits < 32;
    out.push_back( m );
  }
  return out;
}

void pad_and_rewrite( word_netlist& wn, const stride_match& m )
{
  if ( !m.rewritable )
    throw internal_error( "pad_and_rewrite on a non-rewritable match" );
  auto drv = wn.drivers();
  const uint32_t data = wn.cells[m.cell].in[0];
  const uint32_t shamt = wn.cells[m.cell].in[1];
  const uint32_t wd = wn.width( data );
  const uint32_t S = m.stride;
  const uint32_t lp = log2_ceil( S );
  const uint32_t p = 1u << lp;

  // index net with only its significant bits
  uint32_t idx = 0, idx_bits = 0;
  if ( m.index_net == UINT32_MAX )
  {
    const auto cc = *driver_of( wn, drv, shamt );
    std::vector<uint32_t> parts( cc.in.begin(), cc.in.end() - 1 );
    uint32_t w = 0;
    for ( auto n : parts )
      w += wn.width( n );
    idx = parts.size() == 1 ? parts[0] : wn.add_cell( wkind::concat, parts, w );
    drv = wn.drivers();
  }
  else
    idx = m.index_net;
  idx_bits = std::max<uint32_t>( 1, significant_bits( wn, drv, idx ) );
  if ( idx_bits < wn.width( idx ) )
    idx = wn.add_cell( wkind::slice, { idx }, idx_bits, false, 0 );
  else if ( idx_bits > wn.width( idx ) )
    idx_bits = wn.width( idx );

  // blocks reachable by the index
  uint32_t n = m.blocks;
  if ( idx_bits < 31 )
    n = std::min<uint32_t>( n, 1u << idx_bits );

  std::vector<uint32_t> parts; // MSB first
  for ( uint32_t k = n; k-- > 0; )
  {
    uint32_t lo = k * S;
    uint32_t take = std::min( S, wd - lo );
    if ( p > take )
      parts.push_back( wn.add_const( bitvec( p - take ) ) );
    parts.push_back( take == wd ? data : wn.add_cell( wkind::slice, { data }, take, false, lo ) );
  }
  uint32_t packed = parts.size() == 1 ? parts[0] : wn.add_cell( wkind::concat, parts, n * p );

  uint32_t sw = idx_bits + lp;
  uint32_t a = lp ? wn.add_cell( wkind::concat, { wn.add_const( bitvec( lp ) ), idx }, sw ) : idx;
  uint32_t amt = wn.add_cell( wkind::shl, { a, wn.add_const( bitvec( std::max<uint32_t>( 1, log2_ceil( lp + 1 ) ), lp ) ) }, sw );

  auto& c = wn.cells[m.cell];
  c.in[0] = packed;
  c.in[1] = amt;
}

uint32_t partselect_pass( word_netlist& wn )
{
  // (d >> n)[w-1:0] with a logical shift is SHIFTX(d, n)
  {
    auto drv = wn.drivers();
    for ( size_t i = 0; i < wn.cells.size(); ++i )
    {
      auto& c = wn.cells[i];
      if ( c.kind != wkind::slice || c.offset != 0 )
        continue;
      auto d = driver_of( wn, drv, c.in[0] );
      if ( !d || d->kind != wkind::shr || d->is_signed )
        continue;
      std::vector<uint32_t> in = d->in;
      c.kind = wkind::shiftx;
      c.in = in;
      c.is_signed = false;
    }
  }
  uint32_t n = 0;
  for ( const auto& m : detect_strides( wn ) )
    if ( m.rewritable )
    {
      pad_and_rewrite( wn, m );
      ++n;
    }
  if ( n )
    wn.sweep();
  return n;
}

} // namespace svsyn
