#include "svsyn/arith.hpp"

#include <doctest.h>

#include <random>

using namespace svsyn;

namespace
{

/* Evaluates a generator AIG on up to 64 rows; rows[r][port] is the port value. */
std::vector<std::vector<uint64_t>> run_rows( const aig& g, const std::vector<std::vector<uint64_t>>& rows )
{
  std::vector<uint64_t> ci;
  for ( size_t p = 0; p < g.in_ports.size(); ++p )
    for ( uint32_t b = 0; b < g.in_ports[p].width; ++b )
    {
      uint64_t w = 0;
      for ( size_t r = 0; r < rows.size(); ++r )
        w |= ( ( rows[r][p] >> b ) & 1 ) << r;
      ci.push_back( w );
    }
  auto v = simulate_nodes( g, ci );
  std::vector<std::vector<uint64_t>> out( rows.size(), std::vector<uint64_t>( g.out_ports.size(), 0 ) );
  size_t k = 0;
  for ( size_t p = 0; p < g.out_ports.size(); ++p )
    for ( uint32_t b = 0; b < g.out_ports[p].width; ++b )
    {
      lit l = g.pos()[k++].l;
      uint64_t w = v[lit_node( l )] ^ ( lit_compl( l ) ? ~uint64_t( 0 ) : 0 );
      for ( size_t r = 0; r < rows.size(); ++r )
        out[r][p] |= ( ( w >> r ) & 1 ) << b;
    }
  return out;
}

uint64_t mask( uint32_t w ) { return w >= 64 ? ~uint64_t( 0 ) : ( uint64_t( 1 ) << w ) - 1; }

int64_t sext( uint64_t v, uint32_t w ) { return w >= 64 ? int64_t( v ) : int64_t( v << ( 64 - w ) ) >> ( 64 - w ); }

const adder_arch all_archs[] = { adder_arch::ripple, adder_arch::sklansky, adder_arch::kogge_stone, adder_arch::brent_kung };

/* exhaustive or sampled check of an adder against integer addition */
void check_adder( uint32_t w, adder_arch arch, bool cin, uint64_t samples )
{
  auto g = gen_adder( w, arch, cin );
  std::mt19937_64 rng( 1 );
  uint64_t total = uint64_t( 1 ) << std::min<uint32_t>( 2 * w + ( cin ? 1 : 0 ), 63 );
  bool exhaustive = 2 * w + 1 <= 20;
  uint64_t n = exhaustive ? total : samples;
  std::vector<std::vector<uint64_t>> rows;
  uint64_t bad = 0;
  for ( uint64_t i = 0; i < n; ++i )
  {
    uint64_t a, b, c;
    if ( exhaustive )
    {
      a = i & mask( w );
      b = ( i >> w ) & mask( w );
      c = cin ? ( i >> ( 2 * w ) ) & 1 : 0;
    }
    else
    {
      a = rng() & mask( w );
      b = rng() & mask( w );
      c = cin ? rng() & 1 : 0;
    }
    rows.push_back( cin ? std::vector<uint64_t>{ a, b, c } : std::vector<uint64_t>{ a, b } );
    if ( rows.size() == 64 || i + 1 == n )
    {
      auto out = run_rows( g, rows );
      for ( size_t r = 0; r < rows.size(); ++r )
      {
        unsigned __int128 sum = ( unsigned __int128 )rows[r][0] + rows[r][1] + ( cin ? rows[r][2] : 0 );
        if ( out[r][0] != ( uint64_t( sum ) & mask( w ) ) || out[r][1] != uint64_t( sum >> w ) )
          ++bad;
      }
      rows.clear();
    }
  }
  CHECK_MESSAGE( bad == 0, arch_name( arch ) << " width " << w );
}

void check_multiplier( uint32_t wa, uint32_t wb, bool sgn, adder_arch arch, uint64_t samples )
{
  auto g = gen_booth_multiplier( wa, wb, sgn, arch );
  std::mt19937_64 rng( 2 );
  bool exhaustive = wa + wb <= 16;
  uint64_t n = exhaustive ? uint64_t( 1 ) << ( wa + wb ) : samples;
  std::vector<std::vector<uint64_t>> rows;
  uint64_t bad = 0;
  for ( uint64_t i = 0; i < n; ++i )
  {
    uint64_t a = exhaustive ? i & mask( wa ) : rng() & mask( wa );
    uint64_t b = exhaustive ? ( i >> wa ) & mask( wb ) : rng() & mask( wb );
    rows.push_back( { a, b } );
    if ( rows.size() == 64 || i + 1 == n )
    {
      auto out = run_rows( g, rows );
      for ( size_t r = 0; r < rows.size(); ++r )
      {
        uint64_t x = rows[r][0], y = rows[r][1];
        __int128 p = sgn ? ( __int128 )sext( x, wa ) * sext( y, wb ) : ( __int128 )( ( unsigned __int128 )x * y );
        if ( out[r][0] != ( uint64_t( p ) & mask( wa + wb ) ) )
          ++bad;
      }
      rows.clear();
    }
  }
  CHECK_MESSAGE( bad == 0, wa << "x" << wb << ( sgn ? " signed" : " unsigned" ) );
}

} // namespace

TEST_CASE( "one-bit ripple adder is a full adder" )
{
  check_adder( 1, adder_arch::ripple, true, 0 );
}

TEST_CASE( "prefix stage counts" )
{
  aig g;
  word a, b;
  for ( int i = 0; i < 16; ++i )
  {
    a.push_back( g.add_pi( "a" ) );
    b.push_back( g.add_pi( "b" ) );
  }
  CHECK( build_adder( g, a, b, lit_false, adder_arch::kogge_stone ).stages == 4 );
  CHECK( build_adder( g, a, b, lit_false, adder_arch::sklansky ).stages == 4 );
  CHECK( build_adder( g, a, b, lit_false, adder_arch::brent_kung ).stages == 7 );
}

TEST_CASE( "adders: exhaustive at width <= 8, sampled up to 64" )
{
  for ( auto arch : all_archs )
  {
    for ( uint32_t w = 1; w <= 8; ++w )
      check_adder( w, arch, true, 0 );
    for ( uint32_t w : { 13u, 32u, 63u } )
      check_adder( w, arch, true, 10000 );
    check_adder( 16, arch, false, 10000 );
  }
}

TEST_CASE( "Booth multiplier" )
{
  SUBCASE( "exhaustive small widths" )
  {
    for ( bool s : { false, true } )
      for ( uint32_t wa = 1; wa <= 8; ++wa )
        for ( uint32_t wb = 1; wb <= 8; ++wb )
          if ( wa + wb <= 12 || ( wa == 8 && wb == 8 ) )
            check_multiplier( wa, wb, s, adder_arch::ripple, 0 );
  }
  SUBCASE( "sampled wide products" )
  {
    for ( bool s : { false, true } )
    {
      check_multiplier( 16, 16, s, adder_arch::kogge_stone, 10000 );
      check_multiplier( 32, 32, s, adder_arch::brent_kung, 10000 );
      check_multiplier( 24, 7, s, adder_arch::sklansky, 10000 );
    }
  }
  SUBCASE( "row count and degenerate case" )
  {
    aig g;
    word a, b;
    for ( int i = 0; i < 8; ++i )
    {
      a.push_back( g.add_pi( "a" ) );
      b.push_back( g.add_pi( "b" ) );
    }
    CHECK( build_booth_multiplier( g, a, b, true, 16, adder_arch::ripple ).rows == 5 );
    CHECK( build_booth_multiplier( g, a, b, false, 16, adder_arch::ripple ).rows == 5 );
    auto one = gen_booth_multiplier( 1, 1, false );
    CHECK( one.num_ands() == 1 );
  }
}

TEST_CASE( "carry-save tree" )
{
  CHECK( dadda_stages( 1 ) == 0 );
  CHECK( dadda_stages( 2 ) == 0 );
  CHECK( dadda_stages( 3 ) == 1 );
  CHECK( dadda_stages( 4 ) == 2 );
  CHECK( dadda_stages( 9 ) == 4 );

  aig g;
  auto row = [&]( const std::string& n, uint32_t w ) {
    word v;
    for ( uint32_t i = 0; i < w; ++i )
      v.push_back( g.add_pi( n + "[" + std::to_string( i ) + "]" ) );
    return v;
  };
  auto x = row( "x", 8 );
  auto single = build_csa_tree( g, { { x, 0 } }, 8 );
  CHECK( single.sum == x );
  CHECK( std::all_of( single.carry.begin(), single.carry.end(), []( lit l ) { return l == lit_false; } ) );
  CHECK( single.stages == 0 );
  auto three = build_csa_tree( g, { { x, 0 }, { row( "y", 8 ), 0 }, { row( "z", 8 ), 0 } }, 10 );
  CHECK( three.stages == 1 );

  // nine 8-bit addends against the integer sum
  aig h;
  std::vector<addend> adds;
  for ( int i = 0; i < 9; ++i )
  {
    word v;
    for ( int b = 0; b < 8; ++b )
      v.push_back( h.add_pi( "a" + std::to_string( i ) + "_" + std::to_string( b ) ) );
    h.in_ports.push_back( { "a" + std::to_string( i ), 8 } );
    adds.push_back( { v, 0 } );
  }
  auto t = build_csa_tree( h, adds, 12 );
  CHECK( t.stages == 4 );
  for ( size_t i = 0; i < 12; ++i )
    h.add_po( t.sum[i], "s" );
  for ( size_t i = 0; i < 12; ++i )
    h.add_po( t.carry[i], "c" );
  h.out_ports = { { "s", 12 }, { "c", 12 } };
  std::mt19937_64 rng( 9 );
  uint64_t bad = 0;
  for ( int batch = 0; batch < 157; ++batch ) // 10048 cases
  {
    std::vector<std::vector<uint64_t>> rows( 64, std::vector<uint64_t>( 9 ) );
    for ( auto& r : rows )
      for ( auto& v : r )
        v = rng() & 0xff;
    auto out = run_rows( h, rows );
    for ( size_t r = 0; r < rows.size(); ++r )
    {
      uint64_t sum = 0;
      for ( auto v : rows[r] )
        sum += v;
      if ( ( ( out[r][0] + out[r][1] ) & 0xfff ) != sum )
        ++bad;
    }
  }
  CHECK( bad == 0 );
}

TEST_CASE( "generators are deterministic" )
{
  CHECK( write_aiger( gen_adder( 12, adder_arch::brent_kung, true ) ) ==
         write_aiger( gen_adder( 12, adder_arch::brent_kung, true ) ) );
  CHECK( write_aiger( gen_booth_multiplier( 6, 5, true ) ) == write_aiger( gen_booth_multiplier( 6, 5, true ) ) );
}

TEST_CASE( "architecture selection policies" )
{
  word_netlist wn;
  auto a8 = wn.add_input( "a", 8 ), b8 = wn.add_input( "b", 8 );
  auto a32 = wn.add_input( "c", 32 ), b32 = wn.add_input( "d", 32 );
  wn.add_output( "x", wn.add_cell( wkind::add, { a8, b8 }, 8 ) );
  wn.add_output( "y", wn.add_cell( wkind::add, { a32, b32 }, 32 ) );
  const auto& c8 = wn.cells[wn.cells.size() - 2];
  const auto& c32 = wn.cells.back();

  auto area = select_arch( wn, arch_policy::parse( "min_area" ) );
  CHECK( area.arch_for( c8 ) == adder_arch::ripple );
  CHECK( area.arch_for( c32 ) == adder_arch::ripple );
  auto delay = select_arch( wn, arch_policy::parse( "min_delay" ) );
  CHECK( delay.arch_for( c8 ) == adder_arch::kogge_stone );
  CHECK( delay.arch_for( c32 ) == adder_arch::kogge_stone );
  auto bal = select_arch( wn, arch_policy::parse( "balanced(16)" ) );
  CHECK( bal.arch_for( c8 ) == adder_arch::ripple );
  CHECK( bal.arch_for( c32 ) == adder_arch::brent_kung );
  CHECK( arch_policy::parse( "balanced(16)" ).text() == "balanced(16)" );
  CHECK_THROWS_AS( arch_policy::parse( "fastest" ), user_error );
}

TEST_CASE( "MAC fusion" )
{
  SUBCASE( "single-reader product is fused" )
  {
    word_netlist wn;
    auto a = wn.add_input( "a", 4 ), b = wn.add_input( "b", 4 ), c = wn.add_input( "c", 8 );
    auto m = wn.add_cell( wkind::mul, { a, b }, 8 );
    wn.add_output( "y", wn.add_cell( wkind::add, { m, c }, 8 ) );
    auto ref = wn;
    CHECK( fuse_mac( wn, {} ) == 1 );
    CHECK( wn.count( wkind::fma ) == 1 );
    CHECK( wn.count( wkind::mul ) == 0 );
    CHECK( wn.count( wkind::add ) == 0 );
    // 4x4+8: all 2^16 rows
    auto s1 = make_word_simulator( ref );
    auto s2 = make_aig_simulator( bitblast( wn, {} ) );
    auto r = equiv_exhaustive( *s1, *s2 );
    CHECK( r.result == verdict::equivalent );
    CHECK( r.vectors == 65536 );
  }
  SUBCASE( "shared product is left alone" )
  {
    word_netlist wn;
    auto a = wn.add_input( "a", 4 ), b = wn.add_input( "b", 4 ), c = wn.add_input( "c", 8 );
    auto m = wn.add_cell( wkind::mul, { a, b }, 8 );
    wn.add_output( "y", wn.add_cell( wkind::add, { m, c }, 8 ) );
    wn.add_output( "z", wn.add_cell( wkind::add, { c, m }, 8 ) );
    CHECK( fuse_mac( wn, {} ) == 0 );
  }
  SUBCASE( "two products: the left one is fused" )
  {
    word_netlist wn;
    auto a = wn.add_input( "a", 4 ), b = wn.add_input( "b", 4 ), c = wn.add_input( "c", 4 ), d = wn.add_input( "d", 4 );
    auto m1 = wn.add_cell( wkind::mul, { a, b }, 8 );
    auto m2 = wn.add_cell( wkind::mul, { c, d }, 8 );
    wn.add_output( "y", wn.add_cell( wkind::add, { m1, m2 }, 8 ) );
    auto ref = wn;
    CHECK( fuse_mac( wn, {} ) == 1 );
    CHECK( wn.count( wkind::mul ) == 1 );
    for ( const auto& cell : wn.cells )
      if ( cell.kind == wkind::fma )
      {
        CHECK( cell.in[0] == wn.inputs[0].net );
        CHECK( cell.in[1] == wn.inputs[1].net );
      }
    auto s1 = make_word_simulator( ref );
    auto s2 = make_aig_simulator( bitblast( wn, {} ) );
    CHECK( equiv_exhaustive( *s1, *s2 ).result == verdict::equivalent );
  }
  SUBCASE( "disabled" )
  {
    word_netlist wn;
    auto a = wn.add_input( "a", 4 ), b = wn.add_input( "b", 4 ), c = wn.add_input( "c", 8 );
    wn.add_output( "y", wn.add_cell( wkind::add, { wn.add_cell( wkind::mul, { a, b }, 8 ), c }, 8 ) );
    arith_selection sel;
    sel.fuse = false;
    CHECK( fuse_mac( wn, sel ) == 0 );
  }
}
