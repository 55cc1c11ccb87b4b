#include "svsyn/aig.hpp"
#include "svsyn/diagnostic.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace svsyn
{

aig::aig()
{
  nodes_.push_back( {} );
}

lit aig::add_pi( std::string name )
{
  nodes_.push_back( { aig_kind::pi, 0, 0 } );
  pis_.push_back( size() - 1 );
  pi_names_.push_back( std::move( name ) );
  return make_lit( size() - 1 );
}

lit aig::add_latch( std::string name )
{
  nodes_.push_back( { aig_kind::latch, 0, 0 } );
  latches_.push_back( { size() - 1, lit_false, std::move( name ) } );
  return make_lit( size() - 1 );
}

void aig::set_next( uint32_t latch_index, lit next )
{
  latches_.at( latch_index ).next = next;
}

void aig::add_po( lit l, std::string name )
{
  pos_.push_back( { l, std::move( name ) } );
}

namespace
{
uint64_t strash_key( lit a, lit b )
{
  return ( uint64_t( a ) << 32 ) | b;
}
} // namespace

uint32_t aig::find_and( lit a, lit b ) const
{
  if ( a > b )
    std::swap( a, b );
  auto it = strash_.find( strash_key( a, b ) );
  return it == strash_.end() ? UINT32_MAX : it->second;
}

lit aig::add_and( lit a, lit b )
{
  if ( a > b )
    std::swap( a, b );
  if ( a == lit_false )
    return lit_false;
  if ( a == lit_true )
    return b;
  if ( a == b )
    return a;
  if ( a == lit_not( b ) )
    return lit_false;
  auto key = strash_key( a, b );
  if ( auto it = strash_.find( key ); it != strash_.end() )
    return make_lit( it->second );
  nodes_.push_back( { aig_kind::and_, a, b } );
  strash_[key] = size() - 1;
  ++num_ands_;
  return make_lit( size() - 1 );
}

lit aig::add_xor( lit a, lit b )
{
  lit n1 = add_and( a, lit_not( b ) );
  lit n2 = add_and( lit_not( a ), b );
  return add_or( n1, n2 );
}

lit aig::add_mux( lit s, lit a, lit b )
{
  if ( a == b )
    return a;
  lit n1 = add_and( s, a );
  lit n2 = add_and( lit_not( s ), b );
  return add_or( n1, n2 );
}

lit aig::add_maj( lit a, lit b, lit c )
{
  return add_or( add_and( a, b ), add_and( c, add_or( a, b ) ) );
}

std::vector<lit> aig::co_lits() const
{
  std::vector<lit> out;
  for ( const auto& p : pos_ )
    out.push_back( p.l );
  for ( const auto& l : latches_ )
    out.push_back( l.next );
  return out;
}

std::vector<uint32_t> aig::levels() const
{
  std::vector<uint32_t> lv( size(), 0 );
  for ( uint32_t n = 0; n < size(); ++n )
    if ( is_and( n ) )
      lv[n] = 1 + std::max( lv[lit_node( nodes_[n].f0 )], lv[lit_node( nodes_[n].f1 )] );
  return lv;
}

uint32_t aig::depth() const
{
  auto lv = levels();
  uint32_t d = 0;
  for ( auto l : co_lits() )
    d = std::max( d, lv[lit_node( l )] );
  return d;
}

std::vector<uint32_t> aig::fanout_counts() const
{
  std::vector<uint32_t> fo( size(), 0 );
  for ( uint32_t n = 0; n < size(); ++n )
    if ( is_and( n ) )
    {
      ++fo[lit_node( nodes_[n].f0 )];
      ++fo[lit_node( nodes_[n].f1 )];
    }
  for ( auto l : co_lits() )
    ++fo[lit_node( l )];
  return fo;
}

void aig::check() const
{
  std::unordered_map<uint64_t, uint32_t> seen;
  for ( uint32_t n = 0; n < size(); ++n )
  {
    if ( !is_and( n ) )
      continue;
    const auto& nd = nodes_[n];
    if ( lit_node( nd.f0 ) >= n || lit_node( nd.f1 ) >= n )
      throw internal_error( "aig node " + std::to_string( n ) + " is not topologically ordered" );
    lit a = std::min( nd.f0, nd.f1 ), b = std::max( nd.f0, nd.f1 );
    if ( !seen.emplace( strash_key( a, b ), n ).second )
      throw internal_error( "aig nodes " + std::to_string( seen[strash_key( a, b )] ) + " and " + std::to_string( n ) +
                            " share a fanin pair" );
  }
  for ( auto l : co_lits() )
    if ( lit_node( l ) >= size() )
      throw internal_error( "aig output references a missing node" );
}

aig cleanup( const aig& g, uint32_t* removed )
{
  std::vector<bool> live( g.size(), false );
  for ( auto l : g.co_lits() )
    live[lit_node( l )] = true;
  for ( uint32_t n = g.size(); n-- > 0; )
    if ( live[n] && g.is_and( n ) )
    {
      live[lit_node( g.node( n ).f0 )] = true;
      live[lit_node( g.node( n ).f1 )] = true;
    }
  aig r;
  r.in_ports = g.in_ports;
  r.out_ports = g.out_ports;
  r.clock = g.clock;
  std::vector<lit> map( g.size(), lit_false );
  for ( size_t i = 0; i < g.pis().size(); ++i )
    map[g.pis()[i]] = r.add_pi( g.pi_names()[i] );
  for ( const auto& l : g.latches() )
    map[l.node] = r.add_latch( l.name );
  auto m = [&]( lit l ) { return lit_not_cond( map[lit_node( l )], lit_compl( l ) ); };
  for ( uint32_t n = 0; n < g.size(); ++n )
    if ( live[n] && g.is_and( n ) )
      map[n] = r.add_and( m( g.node( n ).f0 ), m( g.node( n ).f1 ) );
  for ( const auto& p : g.pos() )
    r.add_po( m( p.l ), p.name );
  for ( uint32_t i = 0; i < g.latches().size(); ++i )
    r.set_next( i, m( g.latches()[i].next ) );
  if ( removed )
    *removed = g.num_ands() - r.num_ands();
  return r;
}

uint32_t const_fold( aig& g )
{
  uint32_t removed = 0;
  g = cleanup( g, &removed );
  return removed;
}

std::string bit_name( const std::string& port, uint32_t width, uint32_t bit )
{
  return width == 1 ? port : port + "[" + std::to_string( bit ) + "]";
}

/* AIGER */

std::string write_aiger( const aig& g )
{
  std::vector<uint32_t> var( g.size(), 0 );
  uint32_t v = 0;
  for ( auto n : g.pis() )
    var[n] = ++v;
  for ( const auto& l : g.latches() )
    var[l.node] = ++v;
  for ( uint32_t n = 0; n < g.size(); ++n )
    if ( g.is_and( n ) )
      var[n] = ++v;
  auto L = [&]( lit l ) { return 2 * var[lit_node( l )] + ( lit_compl( l ) ? 1 : 0 ); };
  std::ostringstream os;
  os << "aag " << v << " " << g.pis().size() << " " << g.latches().size() << " " << g.pos().size() << " " << g.num_ands() << "\n";
  for ( auto n : g.pis() )
    os << 2 * var[n] << "\n";
  for ( const auto& l : g.latches() )
    os << 2 * var[l.node] << " " << L( l.next ) << "\n";
  for ( const auto& p : g.pos() )
    os << L( p.l ) << "\n";
  for ( uint32_t n = 0; n < g.size(); ++n )
    if ( g.is_and( n ) )
    {
      lit a = L( g.node( n ).f0 ), b = L( g.node( n ).f1 );
      os << 2 * var[n] << " " << std::max( a, b ) << " " << std::min( a, b ) << "\n";
    }
  for ( size_t i = 0; i < g.pis().size(); ++i )
    os << "i" << i << " " << g.pi_names()[i] << "\n";
  for ( size_t i = 0; i < g.latches().size(); ++i )
    os << "l" << i << " " << g.latches()[i].name << "\n";
  for ( size_t i = 0; i < g.pos().size(); ++i )
    os << "o" << i << " " << g.pos()[i].name << "\n";
  os << "c\n";
  if ( !g.clock.empty() )
    os << "clock " << g.clock << "\n";
  return os.str();
}

namespace
{

/* groups `x[0] x[1] ...` runs back into ports */
std::vector<port_info> group_ports( const std::vector<std::string>& names )
{
  std::vector<port_info> out;
  for ( size_t i = 0; i < names.size(); )
  {
    const auto& n = names[i];
    auto lb = n.rfind( '[' );
    if ( lb == std::string::npos || n.back() != ']' || n.substr( lb + 1, n.size() - lb - 2 ) != "0" )
    {
      out.push_back( { n, 1 } );
      ++i;
      continue;
    }
    std::string base = n.substr( 0, lb );
    uint32_t w = 0;
    while ( i + w < names.size() && names[i + w] == base + "[" + std::to_string( w ) + "]" )
      ++w;
    out.push_back( { base, w } );
    i += w;
  }
  return out;
}

} // namespace

aig read_aiger( std::string_view text )
{
  std::vector<std::string> lines;
  {
    std::string cur;
    for ( char c : text )
    {
      if ( c == '\n' )
      {
        lines.push_back( cur );
        cur.clear();
      }
      else if ( c != '\r' )
        cur += c;
    }
    if ( !cur.empty() )
      lines.push_back( cur );
  }
  auto fail = [&]( size_t line, const std::string& msg ) -> void {
    throw user_error( "aiger line " + std::to_string( line + 1 ) + ": " + msg );
  };
  auto nums = [&]( size_t line ) {
    std::vector<uint64_t> v;
    std::istringstream is( lines[line] );
    std::string tok;
    while ( is >> tok )
    {
      uint64_t x = 0;
      auto r = std::from_chars( tok.data(), tok.data() + tok.size(), x );
      if ( r.ec != std::errc() || r.ptr != tok.data() + tok.size() )
        fail( line, "expected a number, got '" + tok + "'" );
      v.push_back( x );
    }
    return v;
  };
  if ( lines.empty() || lines[0].rfind( "aag ", 0 ) != 0 )
    throw user_error( "aiger: missing 'aag' header" );
  std::istringstream hs( lines[0].substr( 4 ) );
  uint64_t M = 0, I = 0, L = 0, O = 0, A = 0;
  if ( !( hs >> M >> I >> L >> O >> A ) )
    fail( 0, "bad header" );
  if ( lines.size() < 1 + I + L + O + A )
    throw user_error( "aiger: file truncated" );

  aig g;
  std::vector<lit> map( M + 1, UINT32_MAX );
  map[0] = lit_false;
  size_t ln = 1;
  std::vector<uint64_t> in_vars, latch_vars, latch_next, outs;
  for ( uint64_t i = 0; i < I; ++i, ++ln )
  {
    auto v = nums( ln );
    if ( v.size() != 1 || v[0] % 2 || v[0] / 2 > M )
      fail( ln, "bad input literal" );
    in_vars.push_back( v[0] / 2 );
  }
  for ( uint64_t i = 0; i < L; ++i, ++ln )
  {
    auto v = nums( ln );
    if ( v.size() < 2 || v[0] % 2 || v[0] / 2 > M || ( v.size() > 2 && v[2] != 0 ) )
      fail( ln, "bad latch line (only reset-to-zero latches are supported)" );
    latch_vars.push_back( v[0] / 2 );
    latch_next.push_back( v[1] );
  }
  for ( uint64_t i = 0; i < O; ++i, ++ln )
  {
    auto v = nums( ln );
    if ( v.size() != 1 )
      fail( ln, "bad output literal" );
    outs.push_back( v[0] );
  }
  std::map<uint64_t, std::pair<uint64_t, uint64_t>> ands;
  for ( uint64_t i = 0; i < A; ++i, ++ln )
  {
    auto v = nums( ln );
    if ( v.size() != 3 || v[0] % 2 || v[0] / 2 > M )
      fail( ln, "bad and line" );
    ands[v[0] / 2] = { v[1], v[2] };
  }
  std::vector<std::string> in_names( I ), latch_names( L ), out_names( O );
  for ( uint64_t i = 0; i < I; ++i )
    in_names[i] = "i" + std::to_string( i );
  for ( uint64_t i = 0; i < L; ++i )
    latch_names[i] = "l" + std::to_string( i );
  for ( uint64_t i = 0; i < O; ++i )
    out_names[i] = "o" + std::to_string( i );
  std::string clock;
  for ( ; ln < lines.size(); ++ln )
  {
    const auto& s = lines[ln];
    if ( s == "c" )
    {
      for ( ++ln; ln < lines.size(); ++ln )
        if ( lines[ln].rfind( "clock ", 0 ) == 0 )
          clock = lines[ln].substr( 6 );
      break;
    }
    auto sp = s.find( ' ' );
    if ( s.empty() || sp == std::string::npos )
      fail( ln, "bad symbol line" );
    uint64_t idx = 0;
    auto r = std::from_chars( s.data() + 1, s.data() + sp, idx );
    if ( r.ec != std::errc() )
      fail( ln, "bad symbol index" );
    auto name = s.substr( sp + 1 );
    auto set = [&]( std::vector<std::string>& v ) {
      if ( idx >= v.size() )
        fail( ln, "symbol index out of range" );
      v[idx] = name;
    };
    if ( s[0] == 'i' )
      set( in_names );
    else if ( s[0] == 'l' )
      set( latch_names );
    else if ( s[0] == 'o' )
      set( out_names );
    else
      fail( ln, "bad symbol line" );
  }

  for ( uint64_t i = 0; i < I; ++i )
    map[in_vars[i]] = g.add_pi( in_names[i] );
  for ( uint64_t i = 0; i < L; ++i )
    map[latch_vars[i]] = g.add_latch( latch_names[i] );
  // ASCII AIGER allows any AND order
  std::function<lit( uint64_t )> resolve = [&]( uint64_t l ) -> lit {
    uint64_t v = l / 2;
    if ( v > M )
      throw user_error( "aiger: literal " + std::to_string( l ) + " out of range" );
    if ( map[v] == UINT32_MAX )
    {
      std::vector<uint64_t> stack{ v };
      while ( !stack.empty() )
      {
        uint64_t x = stack.back();
        auto it = ands.find( x );
        if ( it == ands.end() )
          throw user_error( "aiger: undefined literal " + std::to_string( 2 * x ) );
        uint64_t a = it->second.first / 2, b = it->second.second / 2;
        if ( a > M || b > M )
          throw user_error( "aiger: literal out of range" );
        bool ready = true;
        for ( auto y : { a, b } )
          if ( map[y] == UINT32_MAX )
          {
            if ( std::find( stack.begin(), stack.end(), y ) != stack.end() )
              throw user_error( "aiger: combinational cycle" );
            stack.push_back( y );
            ready = false;
          }
        if ( !ready )
          continue;
        auto lf = [&]( uint64_t q ) { return lit_not_cond( map[q / 2], q & 1 ); };
        map[x] = g.add_and( lf( it->second.first ), lf( it->second.second ) );
        stack.pop_back();
      }
    }
    return lit_not_cond( map[v], l & 1 );
  };
  for ( const auto& [v, f] : ands )
    resolve( 2 * v );
  for ( uint64_t i = 0; i < O; ++i )
    g.add_po( resolve( outs[i] ), out_names[i] );
  for ( uint64_t i = 0; i < L; ++i )
    g.set_next( static_cast<uint32_t>( i ), resolve( latch_next[i] ) );
  g.in_ports = group_ports( in_names );
  g.out_ports = group_ports( out_names );
  g.clock = clock;
  return g;
}

/* truth tables */

uint64_t var_pattern( uint32_t i )
{
  static const uint64_t p[6] = { 0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
                                 0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull };
  return p[i];
}

truth_table cut_function( const aig& g, lit root, const std::vector<uint32_t>& leaves )
{
  if ( leaves.size() > 6 )
    throw user_error( "cut has more than 6 leaves" );
  std::unordered_map<uint32_t, uint64_t> val;
  for ( uint32_t i = 0; i < leaves.size(); ++i )
    val[leaves[i]] = var_pattern( i );
  std::vector<uint32_t> stack{ lit_node( root ) };
  while ( !stack.empty() )
  {
    uint32_t n = stack.back();
    if ( val.count( n ) )
    {
      stack.pop_back();
      continue;
    }
    const auto& nd = g.node( n );
    if ( nd.kind == aig_kind::const0 )
    {
      val[n] = 0;
      stack.pop_back();
      continue;
    }
    if ( nd.kind != aig_kind::and_ )
      throw user_error( "leaf set is not a cut: node " + std::to_string( n ) + " is reachable from the root" );
    uint32_t a = lit_node( nd.f0 ), b = lit_node( nd.f1 );
    bool ready = true;
    for ( auto x : { a, b } )
      if ( !val.count( x ) )
      {
        stack.push_back( x );
        ready = false;
      }
    if ( !ready )
      continue;
    uint64_t va = val[a] ^ ( lit_compl( nd.f0 ) ? ~uint64_t( 0 ) : 0 );
    uint64_t vb = val[b] ^ ( lit_compl( nd.f1 ) ? ~uint64_t( 0 ) : 0 );
    val[n] = va & vb;
    stack.pop_back();
  }
  truth_table t;
  t.k = static_cast<uint32_t>( leaves.size() );
  t.bits = ( val[lit_node( root )] ^ ( lit_compl( root ) ? ~uint64_t( 0 ) : 0 ) ) & t.mask();
  return t;
}

std::vector<uint64_t> simulate_nodes( const aig& g, const std::vector<uint64_t>& ci )
{
  std::vector<uint64_t> v( g.size(), 0 );
  size_t k = 0;
  for ( auto n : g.pis() )
    v[n] = ci.at( k++ );
  for ( const auto& l : g.latches() )
    v[l.node] = ci.at( k++ );
  for ( uint32_t n = 0; n < g.size(); ++n )
    if ( g.is_and( n ) )
    {
      const auto& nd = g.node( n );
      uint64_t a = v[lit_node( nd.f0 )] ^ ( lit_compl( nd.f0 ) ? ~uint64_t( 0 ) : 0 );
      uint64_t b = v[lit_node( nd.f1 )] ^ ( lit_compl( nd.f1 ) ? ~uint64_t( 0 ) : 0 );
      v[n] = a & b;
    }
  return v;
}

namespace
{

class aig_sim : public sim_model
{
public:
  explicit aig_sim( const aig& g ) : g_( g )
  {
    sig_.inputs = g.in_ports;
    sig_.outputs = g.out_ports;
    if ( sig_.inputs.empty() )
      for ( const auto& n : g.pi_names() )
        sig_.inputs.push_back( { n, 1 } );
    if ( sig_.outputs.empty() )
      for ( const auto& p : g.pos() )
        sig_.outputs.push_back( { p.name, 1 } );
    uint32_t ib = 0, ob = 0;
    for ( const auto& p : sig_.inputs )
      ib += p.width;
    for ( const auto& p : sig_.outputs )
      ob += p.width;
    if ( ib != g.pis().size() || ob != g.pos().size() )
      throw internal_error( "aig port grouping does not match its inputs/outputs" );
    state_.assign( g.latches().size(), 0 );
  }

  const signature& sig() const override { return sig_; }
  bool is_sequential() const override { return !g_.latches().empty(); }
  void reset() override { std::fill( state_.begin(), state_.end(), 0 ); }

  void step( const std::vector<lanes>& in, std::vector<lanes>& out, uint32_t ) override
  {
    std::vector<uint64_t> ci;
    for ( const auto& p : in )
      ci.insert( ci.end(), p.begin(), p.end() );
    ci.insert( ci.end(), state_.begin(), state_.end() );
    auto v = simulate_nodes( g_, ci );
    auto val = [&]( lit l ) { return v[lit_node( l )] ^ ( lit_compl( l ) ? ~uint64_t( 0 ) : 0 ); };
    out.assign( sig_.outputs.size(), {} );
    size_t k = 0;
    for ( size_t o = 0; o < sig_.outputs.size(); ++o )
      for ( uint32_t b = 0; b < sig_.outputs[o].width; ++b )
        out[o].push_back( val( g_.pos()[k++].l ) );
    for ( size_t i = 0; i < state_.size(); ++i )
      state_[i] = val( g_.latches()[i].next );
  }

private:
  aig g_;
  signature sig_;
  std::vector<uint64_t> state_;
};

} // namespace

std::unique_ptr<sim_model> make_aig_simulator( const aig& g )
{
  return std::make_unique<aig_sim>( g );
}

} // namespace svsyn
