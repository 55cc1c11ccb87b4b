#include "svsyn/arith.hpp"
#include "svsyn/diagnostic.hpp"

#include <algorithm>

namespace svsyn
{

namespace
{

class blaster
{
public:
  blaster( const word_netlist& wn, const arith_selection& sel ) : wn_( wn ), sel_( sel ), bits_( wn.net_width.size() ) {}

  aig run()
  {
    for ( const auto& p : wn_.inputs )
    {
      word v;
      for ( uint32_t i = 0; i < wn_.width( p.net ); ++i )
        v.push_back( g_.add_pi( bit_name( p.name, wn_.width( p.net ), i ) ) );
      bits_[p.net] = v;
      g_.in_ports.push_back( { p.name, wn_.width( p.net ) } );
    }
    // latches before logic
    std::vector<std::pair<const wcell*, uint32_t>> dffs; // cell, first latch index
    for ( const auto& c : wn_.cells )
      if ( c.kind == wkind::dff )
      {
        uint32_t w = wn_.width( c.out );
        dffs.push_back( { &c, static_cast<uint32_t>( g_.latches().size() ) } );
        word v;
        for ( uint32_t i = 0; i < w; ++i )
          v.push_back( g_.add_latch( bit_name( c.name, w, i ) ) );
        bits_[c.out] = v;
      }
    for ( auto ci : wn_.topo_order() )
    {
      const auto& c = wn_.cells[ci];
      if ( c.kind != wkind::dff )
        bits_[c.out] = cell( c );
    }
    for ( const auto& [c, first] : dffs )
    {
      const auto& d = get( c->in[0] );
      for ( uint32_t i = 0; i < d.size(); ++i )
        g_.set_next( first + i, d[i] );
    }
    for ( const auto& p : wn_.outputs )
    {
      const auto& v = get( p.net );
      for ( uint32_t i = 0; i < v.size(); ++i )
        g_.add_po( v[i], bit_name( p.name, static_cast<uint32_t>( v.size() ), i ) );
      g_.out_ports.push_back( { p.name, static_cast<uint32_t>( v.size() ) } );
    }
    g_.clock = wn_.clock;
    return cleanup( g_ );
  }

private:
  const word_netlist& wn_;
  const arith_selection& sel_;
  aig g_;
  std::vector<word> bits_;

  const word& get( uint32_t net )
  {
    auto& v = bits_[net];
    if ( v.size() != wn_.width( net ) )
    {
      // undriven net reads zero
      if ( v.empty() )
        v.assign( wn_.width( net ), lit_false );
      else
        throw internal_error( "bitblast: width mismatch on net " + std::to_string( net ) );
    }
    return v;
  }

  word ext( const word& v, uint32_t w, bool s ) const
  {
    word r = v;
    lit fill = s && !v.empty() ? v.back() : lit_false;
    r.resize( w, fill );
    return r;
  }

  lit and_tree( std::vector<lit> v )
  {
    if ( v.empty() )
      return lit_true;
    while ( v.size() > 1 )
    {
      std::vector<lit> n;
      for ( size_t i = 0; i + 1 < v.size(); i += 2 )
        n.push_back( g_.add_and( v[i], v[i + 1] ) );
      if ( v.size() % 2 )
        n.push_back( v.back() );
      v = std::move( n );
    }
    return v[0];
  }

  lit equal( const word& a, const word& b )
  {
    std::vector<lit> e;
    for ( size_t i = 0; i < a.size(); ++i )
      e.push_back( g_.add_xnor( a[i], b[i] ) );
    return and_tree( e );
  }

  /* a < b */
  lit less( word a, word b, bool s, adder_arch arch )
  {
    if ( a.empty() )
      return lit_false;
    if ( s )
    {
      a.back() = lit_not( a.back() );
      b.back() = lit_not( b.back() );
    }
    word nb;
    for ( auto x : b )
      nb.push_back( lit_not( x ) );
    // a - b borrows iff a < b
    return lit_not( build_adder( g_, a, nb, lit_true, arch ).cout );
  }

  /* y[k] = d[k + u]; u unsigned, zero beyond d */
  word shift_right( const word& d, const word& u, uint32_t w, lit fill = lit_false )
  {
    word x = d;
    // amounts beyond the data width read all fill
    uint32_t useful = 0;
    while ( useful < 32 && ( uint64_t( 1 ) << useful ) < d.size() + w )
      ++useful;
    std::vector<lit> high;
    for ( size_t i = useful; i < u.size(); ++i )
      high.push_back( u[i] );
    for ( uint32_t s = 0; s < std::min<size_t>( useful, u.size() ); ++s )
    {
      uint64_t sh = uint64_t( 1 ) << s;
      word y( x.size() );
      for ( size_t k = 0; k < x.size(); ++k )
        y[k] = g_.add_mux( u[s], k + sh < x.size() ? x[k + sh] : fill, x[k] );
      x = std::move( y );
    }
    lit ok = lit_not( or_tree( high ) );
    word r( w );
    for ( uint32_t k = 0; k < w; ++k )
    {
      lit b = k < x.size() ? x[k] : fill;
      r[k] = g_.add_mux( ok, b, fill );
    }
    return r;
  }

  lit or_tree( const std::vector<lit>& v )
  {
    std::vector<lit> n;
    for ( auto x : v )
      n.push_back( lit_not( x ) );
    return lit_not( and_tree( n ) );
  }

  word cell( const wcell& c )
  {
    const uint32_t w = wn_.width( c.out );
    auto in = [&]( size_t i ) -> const word& { return get( c.in[i] ); };
    word r( w, lit_false );
    switch ( c.kind )
    {
    case wkind::not_:
      for ( uint32_t i = 0; i < w; ++i )
        r[i] = lit_not( in( 0 )[i] );
      return r;
    case wkind::and_:
    case wkind::or_:
    case wkind::xor_:
      for ( uint32_t i = 0; i < w; ++i )
      {
        lit a = in( 0 )[i], b = in( 1 )[i];
        r[i] = c.kind == wkind::and_ ? g_.add_and( a, b ) : c.kind == wkind::or_ ? g_.add_or( a, b ) : g_.add_xor( a, b );
      }
      return r;
    case wkind::mux:
      for ( uint32_t i = 0; i < w; ++i )
        r[i] = g_.add_mux( in( 0 )[0], in( 1 )[i], in( 2 )[i] );
      return r;
    case wkind::eq:
      return { equal( in( 0 ), in( 1 ) ) };
    case wkind::lt:
      return { less( in( 0 ), in( 1 ), c.is_signed, sel_.default_arch ) };
    case wkind::add:
      return build_adder( g_, in( 0 ), in( 1 ), lit_false, sel_.arch_for( c ) ).sum;
    case wkind::sub:
    {
      word nb;
      for ( auto x : in( 1 ) )
        nb.push_back( lit_not( x ) );
      return build_adder( g_, in( 0 ), nb, lit_true, sel_.arch_for( c ) ).sum;
    }
    case wkind::mul:
      return build_booth_multiplier( g_, in( 0 ), in( 1 ), c.is_signed, w, sel_.arch_for( c ) ).product;
    case wkind::fma:
    {
      word extra = in( 2 );
      return build_booth_multiplier( g_, in( 0 ), in( 1 ), c.is_signed, w, sel_.arch_for( c ), &extra ).product;
    }
    case wkind::shl:
    {
      // reverse, shift right, reverse
      word d = in( 0 );
      std::reverse( d.begin(), d.end() );
      auto y = shift_right( d, in( 1 ), w );
      std::reverse( y.begin(), y.end() );
      return y;
    }
    case wkind::shr:
    {
      const auto& d = in( 0 );
      lit fill = c.is_signed ? d.back() : lit_false;
      return shift_right( d, in( 1 ), w, fill );
    }
    case wkind::shiftx:
    {
      const auto& d = in( 0 );
      const auto& n = in( 1 );
      if ( !c.is_signed )
        return shift_right( d, n, w );
      // y[k] = d[n + k] with n signed: bias by w - 1 and shift {d, w-1 zeros}
      uint32_t an = static_cast<uint32_t>( n.size() );
      uint32_t wb = std::max<uint32_t>( an, 32 - __builtin_clz( w ) ) + 2;
      word nb = ext( n, wb, true );
      word bias;
      for ( uint32_t i = 0; i < wb; ++i )
        bias.push_back( ( ( uint64_t( w - 1 ) >> std::min( i, 63u ) ) & 1 ) && i < 64 ? lit_true : lit_false );
      word u = build_adder( g_, nb, bias, lit_false, sel_.default_arch ).sum;
      // u < 0 means n < -(w-1): everything out of range
      lit negative = u.back();
      u.pop_back();
      word dd( w - 1, lit_false );
      dd.insert( dd.end(), d.begin(), d.end() );
      auto y = shift_right( dd, u, w );
      for ( auto& b : y )
        b = g_.add_and( b, lit_not( negative ) );
      return y;
    }
    case wkind::concat:
    {
      word acc;
      for ( size_t i = c.in.size(); i-- > 0; )
      {
        const auto& v = in( i );
        acc.insert( acc.end(), v.begin(), v.end() );
      }
      return acc;
    }
    case wkind::slice:
      for ( uint32_t i = 0; i < w; ++i )
        r[i] = in( 0 )[c.offset + i];
      return r;
    case wkind::const_:
      for ( uint32_t i = 0; i < w; ++i )
        r[i] = c.value.bit( i ) ? lit_true : lit_false;
      return r;
    case wkind::dff:
      break;
    }
    throw internal_error( "bitblast: unexpected cell kind" );
  }
};

} // namespace

aig bitblast( const word_netlist& wn, const arith_selection& sel )
{
  return blaster( wn, sel ).run();
}

} // namespace svsyn
