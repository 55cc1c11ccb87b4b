#include "svsyn/aig.hpp"
#include "svsyn/arith.hpp"
#include "svsyn/elaborate.hpp"
#include "svsyn/frontend.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace svsyn;

namespace
{

std::string read_file( const std::filesystem::path& p )
{
  std::ifstream in( p );
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE( "node counts of basic gates" )
{
  aig g;
  auto a = g.add_pi( "a" ), b = g.add_pi( "b" );
  g.add_and( a, b );
  CHECK( g.num_ands() == 1 );
  g.add_and( b, a ); // hashed
  CHECK( g.num_ands() == 1 );
  aig x;
  auto p = x.add_pi( "a" ), q = x.add_pi( "b" );
  x.add_po( x.add_xor( p, q ), "y" );
  CHECK( x.num_ands() == 3 );
  aig m;
  auto s = m.add_pi( "s" ), d1 = m.add_pi( "a" ), d0 = m.add_pi( "b" );
  m.add_mux( s, d1, d0 );
  CHECK( m.num_ands() == 3 );
}

TEST_CASE( "constant propagation in AND construction" )
{
  aig g;
  auto a = g.add_pi( "a" );
  CHECK( g.add_and( a, lit_false ) == lit_false );
  CHECK( g.add_and( a, lit_true ) == a );
  CHECK( g.add_and( a, a ) == a );
  CHECK( g.add_and( a, lit_not( a ) ) == lit_false );
  CHECK( g.num_ands() == 0 );
}

TEST_CASE( "cut functions" )
{
  aig g;
  auto a = g.add_pi( "a" ), b = g.add_pi( "b" ), s = g.add_pi( "s" );
  auto n = g.add_and( a, b );
  CHECK( cut_function( g, n, { lit_node( a ), lit_node( b ) } ) == truth_table{ 2, 0x8 } );
  CHECK( cut_function( g, a, { lit_node( a ) } ) == truth_table{ 1, 0x2 } );

  auto m = g.add_mux( s, a, b );
  // oracle: enumerate the rows with variable 0 = b, 1 = a, 2 = s (s is the MSB variable)
  uint64_t expect = 0;
  for ( uint32_t r = 0; r < 8; ++r )
  {
    bool vb = r & 1, va = ( r >> 1 ) & 1, vs = ( r >> 2 ) & 1;
    if ( vs ? va : vb )
      expect |= uint64_t( 1 ) << r;
  }
  CHECK( expect == 0xca );
  CHECK( cut_function( g, m, { lit_node( b ), lit_node( a ), lit_node( s ) } ) == truth_table{ 3, expect } );
  CHECK( cut_function( g, lit_not( n ), { lit_node( a ), lit_node( b ) } ) == truth_table{ 2, 0x7 } );
  CHECK_THROWS_AS( cut_function( g, m, { lit_node( a ), lit_node( s ) } ), user_error );
}

TEST_CASE( "AIGER round trip" )
{
  aig g;
  auto a0 = g.add_pi( "a[0]" ), a1 = g.add_pi( "a[1]" ), e = g.add_pi( "en" );
  g.in_ports = { { "a", 2 }, { "en", 1 } };
  auto q = g.add_latch( "q" );
  g.set_next( 0, g.add_mux( e, g.add_xor( a0, a1 ), q ) );
  g.add_po( q, "y" );
  g.add_po( lit_not( g.add_and( a0, q ) ), "z" );
  g.out_ports = { { "y", 1 }, { "z", 1 } };
  g.clock = "clk";
  auto text = write_aiger( g );
  auto back = read_aiger( text );
  CHECK( write_aiger( back ) == text );
  CHECK( back.in_ports == g.in_ports );
  CHECK( back.clock == "clk" );
  auto s1 = make_aig_simulator( g ), s2 = make_aig_simulator( back );
  equiv_options opts;
  opts.cycles = 6;
  CHECK( equiv_exhaustive( *s1, *s2, opts ).result == verdict::equivalent );

  CHECK_THROWS_AS( read_aiger( "aag 1 1 0 1 0\n2\n" ), user_error );
  CHECK_THROWS_AS( read_aiger( "aag 3 1 0 1 1\n2\n6\n6 8 2\n" ), user_error );
}

TEST_CASE( "cleanup removes dangling logic and never adds nodes" )
{
  aig g;
  auto a = g.add_pi( "a" ), b = g.add_pi( "b" ), c = g.add_pi( "c" );
  g.add_and( a, c ); // dangling
  g.add_po( g.add_xor( a, b ), "y" );
  uint32_t removed = 0;
  auto r = cleanup( g, &removed );
  CHECK( removed == 1 );
  CHECK( r.num_ands() == 3 );
  r.check();
  uint32_t before = r.num_ands();
  const_fold( r );
  CHECK( r.num_ands() <= before );
}

TEST_CASE( "bitblast of every cell kind agrees with the word semantics" )
{
  auto check_kind = [&]( wkind k, uint32_t wa, uint32_t wb, uint32_t w, bool sgn, int n_in = 2 ) {
    CAPTURE( kind_name( k ) );
    CAPTURE( wa );
    CAPTURE( wb );
    CAPTURE( w );
    CAPTURE( sgn );
    word_netlist wn;
    std::vector<uint32_t> in;
    in.push_back( wn.add_input( "a", wa ) );
    if ( n_in > 1 )
      in.push_back( wn.add_input( "b", wb ) );
    if ( n_in > 2 )
      in.push_back( wn.add_input( "c", w ) );
    wn.add_output( "y", wn.add_cell( k, in, w, sgn ) );
    for ( auto arch : { adder_arch::ripple, adder_arch::kogge_stone } )
    {
      arith_selection sel;
      sel.default_arch = arch;
      auto g = bitblast( wn, sel );
      g.check();
      auto ref = make_word_simulator( wn );
      auto dut = make_aig_simulator( g );
      auto r = equiv_exhaustive( *ref, *dut );
      CHECK_MESSAGE( r.result == verdict::equivalent, dump_counterexample( r, ref->sig() ) );
    }
  };
  for ( bool s : { false, true } )
  {
    check_kind( wkind::add, 4, 4, 4, s );
    check_kind( wkind::sub, 4, 4, 4, s );
    check_kind( wkind::mul, 4, 4, 8, s );
    check_kind( wkind::mul, 3, 5, 6, s );
    check_kind( wkind::mul, 4, 4, 4, s );
    check_kind( wkind::fma, 3, 3, 6, s, 3 );
    check_kind( wkind::lt, 4, 4, 1, s );
    check_kind( wkind::shr, 6, 3, 6, s );
    check_kind( wkind::shiftx, 8, 3, 3, s );
    check_kind( wkind::shiftx, 6, 5, 2, s );
  }
  check_kind( wkind::eq, 4, 4, 1, false );
  check_kind( wkind::shl, 6, 3, 6, false );
  check_kind( wkind::shl, 4, 6, 4, false );
  check_kind( wkind::and_, 3, 3, 3, false );
  check_kind( wkind::or_, 3, 3, 3, false );
  check_kind( wkind::xor_, 3, 3, 3, false );
  check_kind( wkind::not_, 3, 3, 3, false, 1 );
}

TEST_CASE( "corpus: bit-level AIGs agree with the source" )
{
  size_t n = 0;
  for ( const auto& e : std::filesystem::directory_iterator( std::string( SVSYN_CORPUS_DIR ) + "/elab" ) )
  {
    if ( e.path().extension() != ".sv" )
      continue;
    ++n;
    auto text = read_file( e.path() );
    auto top = e.path().stem().string();
    CAPTURE( top );
    auto pr = parse_text( text, e.path().string() );
    REQUIRE( pr.ok() );
    auto el = elaborate( pr.design, top );
    auto wn = lower_words( el.design, el.top );
    const_fold( wn );
    auto g = bitblast( wn, {} );
    g.check();
    auto ref = make_ast_interpreter( pr.design, top );
    auto dut = make_aig_simulator( g );
    auto r = equiv_random( *ref, *dut, 256, 3 );
    CHECK_MESSAGE( r.result == verdict::equivalent, dump_counterexample( r, ref->sig() ) );
    auto back = read_aiger( write_aiger( g ) );
    auto dut2 = make_aig_simulator( back );
    CHECK( equiv_random( *ref, *dut2, 64, 4 ).result == verdict::equivalent );
  }
  CHECK( n >= 15 );
}
