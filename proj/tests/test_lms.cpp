#include "svsyn/lms.hpp"
#include "svsyn/verify.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace svsyn;

namespace
{

/* every table reachable from f by permuting, negating inputs and output */
std::set<uint64_t> orbit( const truth_table& f )
{
  std::set<uint64_t> out;
  std::vector<uint32_t> p( f.k );
  for ( uint32_t i = 0; i < f.k; ++i )
    p[i] = i;
  do
  {
    for ( uint32_t neg = 0; neg < ( 1u << f.k ); ++neg )
    {
      uint64_t t = 0;
      for ( uint32_t m = 0; m < ( 1u << f.k ); ++m )
      {
        uint32_t x = 0;
        for ( uint32_t j = 0; j < f.k; ++j )
          if ( ( ( m >> j ) ^ ( neg >> j ) ) & 1 )
            x |= 1u << p[j];
        t |= ( ( f.bits >> x ) & 1 ) << m;
      }
      out.insert( t );
      out.insert( ~t & f.mask() );
    }
  } while ( std::next_permutation( p.begin(), p.end() ) );
  return out;
}

/* smallest AIG size of every 3-input function up to `max_nodes`, by plain enumeration */
std::map<uint64_t, uint32_t> brute_force_sizes( uint32_t max_nodes )
{
  const uint64_t mask = 0xff;
  std::map<uint64_t, uint32_t> best;
  std::vector<uint64_t> sig{ 0xaa, 0xcc, 0xf0 };
  auto note = [&]( uint64_t t, uint32_t n ) {
    for ( uint64_t v : { t, ~t & mask } )
    {
      auto it = best.find( v );
      if ( it == best.end() || it->second > n )
        best[v] = n;
    }
  };
  note( 0, 0 );
  for ( auto s : sig )
    note( s, 0 );
  auto rec = [&]( auto&& self, uint32_t n ) -> void {
    if ( n == max_nodes )
      return;
    const size_t ns = sig.size();
    for ( size_t b = 0; b < ns; ++b )
      for ( size_t a = 0; a < b; ++a )
        for ( uint32_t p = 0; p < 4; ++p )
        {
          uint64_t t = ( ( p & 1 ) ? ~sig[a] : sig[a] ) & ( ( p & 2 ) ? ~sig[b] : sig[b] ) & mask;
          note( t, n + 1 );
          sig.push_back( t );
          self( self, n + 1 );
          sig.pop_back();
        }
  };
  rec( rec, 0 );
  return best;
}

uint64_t eval_impl( const lms_impl& impl, uint32_t row )
{
  std::vector<bool> v( impl.k + 1 + impl.size(), false );
  for ( uint32_t j = 0; j < impl.k; ++j )
    v[j + 1] = ( row >> j ) & 1;
  auto val = [&]( uint32_t l ) { return v[l >> 1] != bool( l & 1 ); };
  for ( uint32_t i = 0; i < impl.size(); ++i )
    v[impl.k + 1 + i] = val( impl.nodes[i][0] ) && val( impl.nodes[i][1] );
  return val( impl.out );
}

truth_table table_of( const lms_impl& impl )
{
  truth_table t{ impl.k, 0 };
  for ( uint32_t r = 0; r < ( 1u << impl.k ); ++r )
    t.bits |= eval_impl( impl, r ) << r;
  return t;
}

aig random_aig( uint32_t pis, uint32_t ands, uint32_t pos, uint32_t seed )
{
  std::mt19937 rng( seed );
  aig g;
  std::vector<lit> sig;
  for ( uint32_t i = 0; i < pis; ++i )
    sig.push_back( g.add_pi( "x" + std::to_string( i ) ) );
  for ( uint32_t i = 0; i < ands; ++i )
  {
    lit a = sig[rng() % sig.size()] ^ ( rng() & 1 );
    lit b = sig[rng() % sig.size()] ^ ( rng() & 1 );
    uint32_t op = rng() % 3;
    sig.push_back( op == 0 ? g.add_and( a, b ) : op == 1 ? g.add_xor( a, b ) : g.add_mux( sig[rng() % sig.size()], a, b ) );
  }
  for ( uint32_t i = 0; i < pos; ++i )
    g.add_po( sig[sig.size() - 1 - i], "y" + std::to_string( i ) );
  return cleanup( g );
}

bool same_function( const aig& a, const aig& b )
{
  auto sa = make_aig_simulator( a ), sb = make_aig_simulator( b );
  auto r = equiv_exhaustive( *sa, *sb );
  if ( r.result == verdict::inconclusive )
    r = equiv_random( *sa, *sb, 4096, 1 );
  return r.result == verdict::equivalent;
}

const lms_db& small_db()
{
  static lms_db db = build_database( 3 );
  return db;
}

} // namespace

TEST_CASE( "NPN class counts" )
{
  CHECK( count_npn_classes( 2 ) == 4 );
  CHECK( count_npn_classes( 3 ) == 14 );
  CHECK( count_npn_classes( 4 ) == 222 );
}

TEST_CASE( "canonical form is the orbit minimum for small k" )
{
  std::mt19937_64 rng( 7 );
  for ( uint32_t k = 1; k <= 4; ++k )
    for ( int i = 0; i < 40; ++i )
    {
      truth_table f{ k, rng() & truth_table{ k, 0 }.mask() };
      auto r = npn_canonize( f );
      auto o = orbit( f );
      CHECK( r.canon.bits == *o.begin() );
      CHECK( npn_apply( f, r.t ) == r.canon );
    }
}

TEST_CASE( "canonization of five and six inputs stays in the class and is stable" )
{
  std::mt19937_64 rng( 9 );
  for ( uint32_t k = 5; k <= 6; ++k )
    for ( int i = 0; i < 50; ++i )
    {
      truth_table f{ k, rng() & truth_table{ k, 0 }.mask() };
      auto r = npn_canonize( f );
      CHECK( npn_apply( f, r.t ) == r.canon );
      CHECK( npn_canonize( f ).canon == r.canon );
      CHECK( npn_canonize( r.canon ).canon == r.canon );
    }
}

TEST_CASE( "exact synthesis of known functions" )
{
  auto c0 = exact_synthesis( { 3, 0 }, 6 );
  REQUIRE( c0 );
  CHECK( c0->size() == 0 );

  auto mux = exact_synthesis( { 3, 0xca }, 6 );
  REQUIRE( mux );
  CHECK( mux->size() == 3 );
  CHECK( table_of( *mux ).bits == 0xca );

  auto x3 = exact_synthesis( { 3, 0x96 }, 6 );
  REQUIRE( x3 );
  CHECK( x3->size() <= 6 );
  CHECK( table_of( *x3 ).bits == 0x96 );
  // nothing smaller exists
  CHECK_FALSE( exact_synthesis( { 3, 0x96 }, x3->size() - 1 ) );

  auto and2 = exact_synthesis( { 2, 0x8 }, 3 );
  REQUIRE( and2 );
  CHECK( and2->size() == 1 );
}

TEST_CASE( "exact synthesis agrees with plain enumeration on three inputs" )
{
  auto sizes = brute_force_sizes( 4 );
  for ( uint64_t f = 0; f < 256; ++f )
  {
    CAPTURE( f );
    auto it = sizes.find( f );
    auto r = exact_synthesis( { 3, f }, 4 );
    if ( it == sizes.end() )
      CHECK_FALSE( r );
    else
    {
      REQUIRE( r );
      CHECK( r->size() == it->second );
      CHECK( table_of( *r ).bits == f );
    }
  }
}

TEST_CASE( "heuristic synthesis computes the function" )
{
  std::mt19937_64 rng( 3 );
  for ( uint32_t k = 0; k <= 6; ++k )
    for ( int i = 0; i < 20; ++i )
    {
      truth_table f{ k, rng() & truth_table{ k, 0 }.mask() };
      CHECK( table_of( heuristic_synthesis( f ) ) == f );
    }
}

TEST_CASE( "database build, text form and round trip" )
{
  const auto& db = small_db();
  CHECK( db.size() == 1 + 2 + 4 + 14 );
  for ( const auto& [key, impl] : db.entries() )
  {
    CHECK( table_of( impl ) == truth_table{ key.first, key.second } );
    CHECK( npn_canonize( { key.first, key.second } ).canon.bits == key.second );
  }
  auto text = db.save();
  CHECK( text.rfind( "lmsdb v1 kmax=6\n", 0 ) == 0 );
  CHECK( text.find( "tt=ca " ) == std::string::npos ); // 0xca is not canonical
  auto again = lms_db::load( text ).save();
  CHECK( again == text );

  CHECK_THROWS_AS( lms_db::load( "bogus\n" ), user_error );
  CHECK_THROWS_AS( lms_db::load( "lmsdb v1 kmax=6\ntt=8 k=2 nodes=1 depth=1 impl=2,4,7\n" ), user_error );
  CHECK_THROWS_AS( lms_db::load( "lmsdb v1 kmax=6\ntt=8 k=2 nodes=1 depth=1 impl=2,40,6\n" ), user_error );
  CHECK_NOTHROW( lms_db::load( "lmsdb v1 kmax=6\ntt=8 k=2 nodes=1 depth=1 impl=2,4,6\n" ) );
}

TEST_CASE( "cut enumeration" )
{
  auto g = random_aig( 6, 30, 3, 1 );
  auto cuts = enumerate_cuts( g, 6, 10 );
  for ( uint32_t n = 1; n < g.size(); ++n )
  {
    REQUIRE( !cuts[n].empty() );
    CHECK( cuts[n][0].leaves == std::vector<uint32_t>{ n } );
    CHECK( cuts[n].size() <= 10 );
    for ( size_t i = 1; i < cuts[n].size(); ++i )
    {
      const auto& c = cuts[n][i];
      CHECK( c.leaves.size() <= 6 );
      CHECK_NOTHROW( cut_function( g, make_lit( n ), c.leaves ) );
      if ( i > 1 )
      {
        const auto& p = cuts[n][i - 1];
        CHECK( ( p.leaves.size() < c.leaves.size() || ( p.leaves.size() == c.leaves.size() && p.volume <= c.volume ) ) );
      }
    }
  }
}

TEST_CASE( "four-node mux is rewritten to three" )
{
  aig g;
  auto s = g.add_pi( "s" ), a = g.add_pi( "a" ), b = g.add_pi( "b" );
  auto n1 = g.add_and( s, a );
  auto n2 = g.add_and( lit_not( s ), b );
  auto n3 = g.add_and( n2, lit_not( n1 ) );
  g.add_po( g.add_or( n1, n3 ), "y" );
  REQUIRE( g.num_ands() == 4 );
  auto ref = g;
  auto st = rewrite( g, small_db() );
  CHECK( st.nodes_before == 4 );
  CHECK( g.num_ands() == 3 );
  CHECK( same_function( ref, g ) );
}

TEST_CASE( "property: rewriting keeps function and never grows" )
{
  for ( uint32_t seed = 0; seed < 25; ++seed )
  {
    CAPTURE( seed );
    auto g = random_aig( 5 + seed % 6, 20 + 3 * seed, 1 + seed % 4, seed );
    auto db = small_db();
    auto area = g, depth = g;
    auto sa = rewrite( area, db, rewrite_objective::area );
    auto sd = rewrite( depth, db, rewrite_objective::depth );
    CHECK( sa.nodes_after <= sa.nodes_before );
    CHECK( sd.nodes_after <= sd.nodes_before );
    CHECK( sd.depth_after <= sd.depth_before );
    area.check();
    depth.check();
    CHECK( same_function( g, area ) );
    CHECK( same_function( g, depth ) );
  }
}

TEST_CASE( "harvest collects canonical classes" )
{
  auto g = random_aig( 6, 40, 2, 5 );
  auto classes = harvest( g, 4, 8 );
  CHECK( !classes.empty() );
  for ( const auto& c : classes )
  {
    CHECK( c.k <= 4 );
    CHECK( npn_canonize( c ).canon == c );
  }
  auto db = build_database( 2, classes );
  for ( const auto& c : classes )
    CHECK( db.find( c ) != nullptr );
}
