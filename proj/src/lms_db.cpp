#include "svsyn/diagnostic.hpp"
#include "svsyn/lms.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>

namespace svsyn
{

uint32_t lms_impl::depth() const
{
  std::vector<uint32_t> lv( k + 1 + nodes.size(), 0 );
  for ( size_t i = 0; i < nodes.size(); ++i )
    lv[k + 1 + i] = 1 + std::max( lv[nodes[i][0] >> 1], lv[nodes[i][1] >> 1] );
  return lv[out >> 1];
}

truth_table lms_impl::function() const
{
  truth_table r{ k, 0 };
  std::vector<uint64_t> v( k + 1 + nodes.size(), 0 );
  for ( uint32_t j = 0; j < k; ++j )
    v[j + 1] = var_pattern( j );
  auto val = [&]( uint32_t l ) { return ( l & 1 ) ? ~v[l >> 1] : v[l >> 1]; };
  for ( size_t i = 0; i < nodes.size(); ++i )
    v[k + 1 + i] = val( nodes[i][0] ) & val( nodes[i][1] );
  r.bits = val( out ) & r.mask();
  return r;
}

/* exact synthesis */

namespace
{

struct aborted
{
};

class exact_search
{
public:
  exact_search( const truth_table& f, uint32_t n, uint64_t budget ) : k_( f.k ), mask_( f.mask() ), target_( f.bits & mask_ ), n_( n ), budget_( budget )
  {
    for ( uint32_t j = 0; j < k_; ++j )
      tts_.push_back( var_pattern( j ) & mask_ );
    fanout_.assign( k_ + n_, 0 );
  }

  std::optional<lms_impl> run()
  {
    if ( !dfs( 0, 0 ) )
      return std::nullopt;
    lms_impl r;
    r.k = k_;
    auto lit_of = [&]( uint32_t sig, bool c ) { return 2 * ( sig + 1 ) + ( c ? 1u : 0u ); };
    for ( const auto& s : steps_ )
      r.nodes.push_back( { lit_of( s.a, s.p & 1 ), lit_of( s.b, s.p & 2 ) } );
    r.out = lit_of( k_ + n_ - 1, out_neg_ );
    return r;
  }

  uint64_t steps() const { return count_; }

private:
  struct step
  {
    uint32_t a, b, p;
  };

  uint32_t k_;
  uint64_t mask_, target_;
  uint32_t n_;
  uint64_t budget_;
  uint64_t count_ = 0;
  std::vector<uint64_t> tts_;
  std::vector<uint32_t> fanout_;
  std::vector<step> steps_;
  bool out_neg_ = false;

  bool fresh( uint64_t t ) const
  {
    if ( t == 0 || t == mask_ )
      return false;
    for ( auto u : tts_ )
      if ( u == t || ( ~u & mask_ ) == t )
        return false;
    return true;
  }

  bool dfs( uint32_t i, uint64_t prev_key )
  {
    if ( ++count_ > budget_ )
      throw aborted{};
    const uint32_t nsig = k_ + i;
    uint32_t dangling = 0;
    for ( uint32_t s = k_; s < nsig; ++s )
      dangling += fanout_[s] == 0;
    const uint32_t remaining = n_ - i;
    if ( dangling > remaining + 1 )
      return false;
    const bool last = i + 1 == n_;
    for ( uint32_t b = 1; b < nsig; ++b )
      for ( uint32_t a = 0; a < b; ++a )
        for ( uint32_t p = 0; p < 4; ++p )
        {
          uint64_t key = ( uint64_t( b ) << 20 ) | ( uint64_t( a ) << 4 ) | p;
          if ( key <= prev_key && i > 0 )
            continue;
          // all earlier dangling nodes must be consumed in time
          uint32_t used = ( a >= k_ && !fanout_[a] ) + ( b >= k_ && !fanout_[b] );
          if ( last && used != dangling )
            continue;
          uint64_t ta = ( p & 1 ) ? ~tts_[a] : tts_[a];
          uint64_t tb = ( p & 2 ) ? ~tts_[b] : tts_[b];
          uint64_t t = ta & tb & mask_;
          if ( last )
          {
            if ( t == target_ || ( ~t & mask_ ) == target_ )
            {
              out_neg_ = t != target_;
              steps_.push_back( { a, b, p } );
              return true;
            }
            continue;
          }
          if ( !fresh( t ) )
            continue;
          tts_.push_back( t );
          ++fanout_[a];
          ++fanout_[b];
          steps_.push_back( { a, b, p } );
          if ( dfs( i + 1, key ) )
            return true;
          steps_.pop_back();
          --fanout_[a];
          --fanout_[b];
          tts_.pop_back();
        }
    return false;
  }
};

uint32_t support_size( const truth_table& f )
{
  uint32_t s = 0;
  for ( uint32_t j = 0; j < f.k; ++j )
  {
    uint64_t m = var_pattern( j ) & f.mask();
    uint32_t sh = 1u << j;
    if ( ( ( f.bits & m ) >> sh ) != ( f.bits & ( m >> sh ) ) )
      ++s;
  }
  return s;
}

/* builds f over the literals in `vars` */
lit shannon( aig& g, uint64_t f, uint32_t k, const std::vector<lit>& vars )
{
  const uint64_t mask = truth_table{ k, 0 }.mask();
  f &= mask;
  if ( f == 0 )
    return lit_false;
  if ( f == mask )
    return lit_true;
  for ( uint32_t j = 0; j < k; ++j )
    if ( ( ( var_pattern( j ) & mask ) & f ) == ( var_pattern( j ) & mask ) && ( f & ~var_pattern( j ) & mask ) == 0 )
      return vars[j];
  // split on the highest variable in the support
  uint32_t top = k;
  for ( uint32_t j = k; j-- > 0; )
  {
    uint64_t m = var_pattern( j ) & mask;
    uint32_t sh = 1u << j;
    if ( ( ( f & m ) >> sh ) != ( f & ( m >> sh ) ) )
    {
      top = j;
      break;
    }
  }
  const uint64_t m = var_pattern( top ) & mask;
  const uint32_t sh = 1u << top;
  uint64_t f1 = ( f & m ) >> sh;
  uint64_t f0 = f & ( m >> sh );
  f1 |= f1 << sh;
  f0 |= f0 << sh;
  f1 &= mask;
  f0 &= mask;
  lit x = vars[top];
  if ( f0 == 0 )
    return g.add_and( x, shannon( g, f1, k, vars ) );
  if ( f1 == 0 )
    return g.add_and( lit_not( x ), shannon( g, f0, k, vars ) );
  if ( f0 == mask )
    return g.add_or( lit_not( x ), shannon( g, f1, k, vars ) );
  if ( f1 == mask )
    return g.add_or( x, shannon( g, f0, k, vars ) );
  if ( f1 == ( ~f0 & mask ) )
    return g.add_xor( x, shannon( g, f0, k, vars ) );
  return g.add_mux( x, shannon( g, f1, k, vars ), shannon( g, f0, k, vars ) );
}

lms_impl impl_from_aig( const aig& g, uint32_t k )
{
  lms_impl r;
  r.k = k;
  r.exact = false;
  std::vector<uint32_t> map( g.size(), 0 );
  for ( uint32_t j = 0; j < k; ++j )
    map[g.pis()[j]] = 2 * ( j + 1 );
  auto m = [&]( lit l ) { return map[lit_node( l )] ^ ( l & 1 ); };
  for ( uint32_t n = 0; n < g.size(); ++n )
    if ( g.is_and( n ) )
    {
      r.nodes.push_back( { m( g.node( n ).f0 ), m( g.node( n ).f1 ) } );
      map[n] = 2 * ( k + r.size() );
    }
  r.out = m( g.pos()[0].l );
  return r;
}

} // namespace

lms_impl heuristic_synthesis( const truth_table& f )
{
  // try each variable order rotation and keep the smallest
  std::optional<lms_impl> best;
  for ( uint32_t rot = 0; rot < std::max<uint32_t>( 1, f.k ); ++rot )
  {
    aig g;
    std::vector<lit> vars;
    for ( uint32_t j = 0; j < f.k; ++j )
      vars.push_back( g.add_pi( "x" + std::to_string( j ) ) );
    std::vector<lit> order( f.k );
    for ( uint32_t j = 0; j < f.k; ++j )
      order[j] = vars[( j + rot ) % f.k];
    g.add_po( shannon( g, f.bits, f.k, order ), "f" );
    auto c = cleanup( g );
    auto impl = impl_from_aig( c, f.k );
    if ( !best || impl.size() < best->size() || ( impl.size() == best->size() && impl.depth() < best->depth() ) )
      best = impl;
  }
  return *best;
}

std::optional<lms_impl> exact_synthesis( const truth_table& f, uint32_t max_nodes, uint64_t step_budget, bool* out_of_budget )
{
  if ( out_of_budget )
    *out_of_budget = false;
  const uint64_t mask = f.mask();
  const uint64_t t = f.bits & mask;
  lms_impl r;
  r.k = f.k;
  if ( t == 0 || t == mask )
  {
    r.out = t == 0 ? 0 : 1;
    return r;
  }
  for ( uint32_t j = 0; j < f.k; ++j )
  {
    uint64_t v = var_pattern( j ) & mask;
    if ( t == v || t == ( ~v & mask ) )
    {
      r.out = 2 * ( j + 1 ) + ( t == v ? 0 : 1 );
      return r;
    }
  }
  uint64_t used = 0;
  for ( uint32_t n = std::max<uint32_t>( 1, support_size( f ) - 1 ); n <= max_nodes; ++n )
  {
    exact_search s( f, n, step_budget - used );
    try
    {
      if ( auto r2 = s.run() )
        return r2;
    }
    catch ( const aborted& )
    {
      if ( out_of_budget )
        *out_of_budget = true;
      return std::nullopt;
    }
    used += s.steps();
  }
  return std::nullopt;
}

/* database */

void lms_db::add( const truth_table& canon, lms_impl impl )
{
  entries_[{ canon.k, canon.bits }] = std::move( impl );
}

const lms_impl* lms_db::find( const truth_table& canon ) const
{
  auto it = entries_.find( { canon.k, canon.bits } );
  return it == entries_.end() ? nullptr : &it->second;
}

std::string lms_db::save() const
{
  std::ostringstream os;
  os << "lmsdb v1 kmax=6\n";
  for ( const auto& [key, impl] : entries_ )
  {
    char hex[24];
    auto [end, ec] = std::to_chars( hex, hex + sizeof( hex ), key.second, 16 );
    os << "tt=" << std::string( hex, end ) << " k=" << key.first << " nodes=" << impl.size() << " depth=" << impl.depth() << " exact="
       << ( impl.exact ? 1 : 0 ) << " impl=";
    for ( const auto& n : impl.nodes )
      os << n[0] << ',' << n[1] << ',';
    os << impl.out << '\n';
  }
  return os.str();
}

lms_db lms_db::load( const std::string& text )
{
  std::istringstream is( text );
  std::string line;
  if ( !std::getline( is, line ) || line != "lmsdb v1 kmax=6" )
    throw user_error( "lmsdb line 1: bad header" );
  lms_db db;
  uint32_t lineno = 1;
  while ( std::getline( is, line ) )
  {
    ++lineno;
    if ( line.empty() )
      continue;
    auto fail = [&]( const std::string& why ) { throw user_error( "lmsdb line " + std::to_string( lineno ) + ": " + why ); };
    std::istringstream ls( line );
    std::string field;
    truth_table tt;
    lms_impl impl;
    int64_t nodes = -1, depth = -1;
    bool have_tt = false, have_impl = false;
    while ( ls >> field )
    {
      auto eq = field.find( '=' );
      if ( eq == std::string::npos )
        fail( "expected key=value" );
      auto key = field.substr( 0, eq );
      auto val = field.substr( eq + 1 );
      auto num = [&]( int base ) {
        uint64_t v = 0;
        auto [p, ec] = std::from_chars( val.data(), val.data() + val.size(), v, base );
        if ( ec != std::errc() || p != val.data() + val.size() )
          fail( "bad number in '" + field + "'" );
        return v;
      };
      if ( key == "tt" )
      {
        tt.bits = num( 16 );
        have_tt = true;
      }
      else if ( key == "k" )
        tt.k = impl.k = static_cast<uint32_t>( num( 10 ) );
      else if ( key == "nodes" )
        nodes = static_cast<int64_t>( num( 10 ) );
      else if ( key == "depth" )
        depth = static_cast<int64_t>( num( 10 ) );
      else if ( key == "exact" )
        impl.exact = num( 10 ) != 0;
      else if ( key == "impl" )
      {
        std::vector<uint32_t> lits;
        std::istringstream vs( val );
        std::string tok;
        while ( std::getline( vs, tok, ',' ) )
        {
          uint32_t v = 0;
          auto [p, ec] = std::from_chars( tok.data(), tok.data() + tok.size(), v );
          if ( ec != std::errc() || p != tok.data() + tok.size() )
            fail( "bad literal '" + tok + "'" );
          lits.push_back( v );
        }
        if ( lits.empty() || lits.size() % 2 == 0 )
          fail( "impl needs node pairs and an output" );
        for ( size_t i = 0; i + 1 < lits.size(); i += 2 )
          impl.nodes.push_back( { lits[i], lits[i + 1] } );
        impl.out = lits.back();
        have_impl = true;
      }
      else
        fail( "unknown key '" + key + "'" );
    }
    if ( !have_tt || !have_impl || tt.k > 6 )
      fail( "missing tt, k or impl" );
    impl.k = tt.k;
    for ( size_t i = 0; i < impl.nodes.size(); ++i )
      for ( auto l : impl.nodes[i] )
        if ( ( l >> 1 ) >= tt.k + 1 + i )
          fail( "literal " + std::to_string( l ) + " is not defined before use" );
    if ( ( impl.out >> 1 ) >= tt.k + 1 + impl.nodes.size() )
      fail( "output literal out of range" );
    if ( nodes >= 0 && static_cast<uint64_t>( nodes ) != impl.size() )
      fail( "node count does not match impl" );
    if ( depth >= 0 && static_cast<uint32_t>( depth ) != impl.depth() )
      fail( "depth does not match impl" );
    if ( impl.function() != truth_table{ tt.k, tt.bits & tt.mask() } )
      fail( "impl does not compute tt" );
    db.add( tt, std::move( impl ) );
  }
  return db;
}

lms_db build_database( uint32_t kmax_full, const std::set<truth_table>& extra, uint64_t step_budget )
{
  if ( kmax_full > 4 )
    throw user_error( "build_database: full enumeration is limited to k <= 4" );
  std::set<truth_table> classes = extra;
  for ( uint32_t k = 0; k <= kmax_full; ++k )
    for ( uint64_t f = 0; f < ( uint64_t( 1 ) << ( 1u << k ) ); ++f )
      classes.insert( npn_canonize( { k, f } ).canon );
  lms_db db;
  for ( const auto& c : classes )
  {
    auto h = heuristic_synthesis( c );
    bool gave_up = false;
    std::optional<lms_impl> e;
    if ( h.size() > 0 )
      e = exact_synthesis( c, h.size() - 1, step_budget, &gave_up );
    if ( e )
      db.add( c, *e );
    else
    {
      // nothing smaller exists unless the search gave up
      h.exact = !gave_up;
      db.add( c, h );
    }
  }
  return db;
}

} // namespace svsyn
