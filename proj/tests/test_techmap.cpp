#include "svsyn/arith.hpp"
#include "svsyn/elaborate.hpp"
#include "svsyn/frontend.hpp"
#include "svsyn/techmap.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
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
    g.add_po( sig[sig.size() - 1 - i] ^ ( i & 1 ), "y" + std::to_string( i ) );
  return cleanup( g );
}

bool same_function( const aig& a, const aig& b )
{
  auto sa = make_aig_simulator( a ), sb = make_aig_simulator( b );
  auto r = equiv_exhaustive( *sa, *sb );
  if ( r.result == verdict::inconclusive )
    r = equiv_random( *sa, *sb, 2048, 1 );
  return r.result == verdict::equivalent;
}

/* oracle: recompute the path delay from the library, independent of sta's sums */
double path_sum( const timing_report& t, const cell_library& lib )
{
  double s = 0;
  for ( const auto& st : t.path )
    s += *lib.get( st.cell ).delay_ns;
  return s;
}

mapped_netlist chain( const std::string& cell, uint32_t n )
{
  mapped_netlist mn;
  mn.input_names = { "a" };
  mn.in_ports = { { "a", 1 } };
  mn.num_nets = 3;
  uint32_t prev = 2;
  for ( uint32_t i = 0; i < n; ++i )
  {
    mn.instances.push_back( { "c" + std::to_string( i ), cell, { prev }, mn.num_nets } );
    prev = mn.num_nets++;
  }
  mn.outputs = { { "y", prev } };
  mn.out_ports = { { "y", 1 } };
  return mn;
}

} // namespace

TEST_CASE( "default library and its JSON form" )
{
  auto lib = cell_library::default_library();
  CHECK_NOTHROW( lib.validate() );
  CHECK( lib.get( "NAND2" ).area_ge == 1.0 );
  auto text = lib.to_json();
  auto back = cell_library::from_json( text );
  CHECK( back.to_json() == text );

  auto broken = lib;
  broken.cells.erase( broken.cells.begin() + 1 ); // NAND2
  CHECK_THROWS_AS( broken.validate(), user_error );
  broken = lib;
  broken.cells[3].delay_ns = 0.0;
  CHECK_THROWS_AS( broken.validate(), user_error );
  broken = lib;
  broken.cells[0].tt = 0x7; // wider than one input
  CHECK_THROWS_AS( broken.validate(), user_error );
  CHECK_THROWS_AS( cell_library::from_json( "{\"cells\": [{\"name\": \"INV\", \"k\": 1, \"tt\": \"1\", \"area_ge\": 0.5, \"delay_ns\": 0.05, \"x\": 1}]}" ),
                   user_error );
  CHECK_THROWS_AS( cell_library::from_json( "[1," ), user_error );
}

TEST_CASE( "small covers" )
{
  auto lib = cell_library::default_library();
  {
    aig g;
    auto a = g.add_pi( "a" ), b = g.add_pi( "b" );
    g.add_po( g.add_and( a, b ), "y" );
    auto mn = map( g, lib );
    REQUIRE( mn.instances.size() == 1 );
    CHECK( mn.instances[0].cell == "AND2" );
  }
  {
    aig g;
    auto a = g.add_pi( "a" ), b = g.add_pi( "b" );
    g.add_po( g.add_xor( a, b ), "y" );
    REQUIRE( g.num_ands() == 3 );
    for ( auto obj : { map_objective::area, map_objective::delay } )
    {
      auto mn = map( g, lib, obj );
      REQUIRE( mn.instances.size() == 1 );
      CHECK( mn.instances[0].cell == "XOR2" );
    }
    CHECK( area( map_nand_inv( g, lib ), lib ).total_ge > area( map( g, lib ), lib ).total_ge );
  }
  {
    aig g;
    auto mn = map( g, lib );
    CHECK( mn.instances.empty() );
    CHECK( area( mn, lib ).total_ge == 0.0 );
    auto t = sta( mn, lib );
    CHECK( t.critical_path_ns == 0.0 );
    CHECK_FALSE( t.fmax_mhz );
  }
}

TEST_CASE( "timing and area sums" )
{
  auto lib = cell_library::default_library();
  auto inv10 = chain( "INV", 10 );
  auto t = sta( inv10, lib );
  CHECK( t.critical_path_ns == doctest::Approx( 0.5 ) );
  CHECK( t.path.size() == 10 );
  CHECK( t.startpoint == "a" );
  CHECK( t.endpoint == "y" );
  REQUIRE( t.fmax_mhz );
  CHECK( *t.fmax_mhz == doctest::Approx( 2000.0 ) );

  CHECK( area( chain( "NAND2", 0 ), lib ).total_ge == 0.0 );
  auto nands = chain( "INV", 0 );
  for ( uint32_t i = 0; i < 10; ++i )
    nands.instances.push_back( { "n" + std::to_string( i ), "NAND2", { 2, 2 }, nands.num_nets++ } );
  CHECK( area( nands, lib ).total_ge == doctest::Approx( 10.0 ) );
  auto mixed = chain( "INV", 2 );
  for ( uint32_t i = 0; i < 4; ++i )
    mixed.instances.push_back( { "n" + std::to_string( i ), "NAND2", { 2, 2 }, mixed.num_nets++ } );
  auto ar = area( mixed, lib );
  CHECK( ar.total_ge == doctest::Approx( 5.0 ) );
  CHECK( ar.cells["NAND2"] == 4 );
  CHECK( ar.cells["INV"] == 2 );

  // a loop
  auto loop = chain( "INV", 2 );
  loop.instances[0].inputs[0] = loop.instances[1].output;
  CHECK_THROWS_AS( sta( loop, lib ), user_error );
}

TEST_CASE( "property: mapping preserves function and respects the objectives" )
{
  auto lib = cell_library::default_library();
  for ( uint32_t seed = 0; seed < 20; ++seed )
  {
    CAPTURE( seed );
    auto g = random_aig( 4 + seed % 8, 15 + 4 * seed, 1 + seed % 5, seed );
    auto ma = map( g, lib, map_objective::area );
    auto md = map( g, lib, map_objective::delay );
    auto fb = map_nand_inv( g, lib );
    CHECK( same_function( g, to_aig( ma, lib ) ) );
    CHECK( same_function( g, to_aig( md, lib ) ) );
    CHECK( same_function( g, to_aig( fb, lib ) ) );
    CHECK( area( ma, lib ).total_ge <= area( fb, lib ).total_ge );
    auto ta = sta( ma, lib ), td = sta( md, lib );
    CHECK( td.critical_path_ns <= ta.critical_path_ns );
    for ( const auto& t : { ta, td } )
    {
      CHECK( path_sum( t, lib ) == doctest::Approx( t.critical_path_ns ) );
      if ( t.fmax_mhz )
        CHECK( *t.fmax_mhz == doctest::Approx( 1000.0 / t.critical_path_ns ) );
      for ( const auto& e : t.endpoints )
        CHECK( e.slack_ns >= 0 );
    }
    // the area report is the weighted count
    double total = 0;
    for ( const auto& inst : ma.instances )
      total += lib.get( inst.cell ).area_ge;
    CHECK( area( ma, lib ).total_ge == doctest::Approx( total ) );
  }
}

TEST_CASE( "corpus: mapped Verilog simulates like the source" )
{
  auto lib = cell_library::default_library();
  size_t n = 0;
  for ( const auto& e : std::filesystem::directory_iterator( std::string( SVSYN_CORPUS_DIR ) + "/elab" ) )
  {
    if ( e.path().extension() != ".sv" )
      continue;
    auto top = e.path().stem().string();
    CAPTURE( top );
    auto pr = parse_text( read_file( e.path() ), e.path().string() );
    REQUIRE( pr.ok() );
    auto el = elaborate( pr.design, top );
    auto wn = lower_words( el.design, el.top );
    const_fold( wn );
    auto g = bitblast( wn, {} );
    auto mn = map( g, lib, n % 2 ? map_objective::delay : map_objective::area );
    auto text = write_mapped_verilog( mn, lib, top );
    CHECK( write_mapped_verilog( mn, lib, top ) == text );
    auto back = parse_text( text, "mapped.v" );
    REQUIRE_MESSAGE( back.ok(), ( back.diags.empty() ? std::string() : back.diags.front().format() ) );
    auto ref = make_ast_interpreter( pr.design, top );
    auto dut = make_ast_interpreter( back.design, top );
    auto r = equiv_random( *ref, *dut, 64, 8 );
    CHECK_MESSAGE( r.result == verdict::equivalent, dump_counterexample( r, ref->sig() ) );
    ++n;
  }
  CHECK( n >= 15 );
}
