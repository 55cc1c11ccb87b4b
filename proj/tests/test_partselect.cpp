#include "svsyn/elaborate.hpp"
#include "svsyn/frontend.hpp"
#include "svsyn/partselect.hpp"
#include "svsyn/verify.hpp"

#include <doctest.h>

using namespace svsyn;

namespace
{

word_netlist lower_text( const std::string& text, const std::string& top )
{
  auto r = parse_text( text, "t.sv" );
  REQUIRE( r.ok() );
  auto e = elaborate( r.design, top );
  auto wn = lower_words( e.design, e.top );
  const_fold( wn );
  return wn;
}

void check_equiv( const word_netlist& a, const word_netlist& b )
{
  auto sa = make_word_simulator( a ), sb = make_word_simulator( b );
  auto r = equiv_exhaustive( *sa, *sb, { 20, 1 } );
  if ( r.result == verdict::inconclusive )
    r = equiv_random( *sa, *sb, 100000, 5 );
  CHECK_MESSAGE( r.result == verdict::equivalent, dump_counterexample( r, sa->sig() ) );
}

const wcell& driver( const word_netlist& wn, uint32_t net )
{
  auto d = wn.drivers();
  REQUIRE( d[net] >= 0 );
  return wn.cells[d[net]];
}

} // namespace

TEST_CASE( "detects multiply, shift and concat strides" )
{
  auto wn = lower_text( R"(
module t(input logic [95:0] d, input logic [1:0] i, output logic [23:0] y);
  assign y = d[i*24 +: 24];
endmodule)",
                        "t" );
  auto m = detect_strides( wn );
  REQUIRE( m.size() == 1 );
  CHECK( m[0].stride == 24 );
  CHECK( m[0].blocks == 4 );
  CHECK( m[0].block_width == 24 );
  CHECK( m[0].rewritable );

  // hand-built {i, 3'b0} and SHL(i, 3)
  for ( int form = 0; form < 2; ++form )
  {
    word_netlist w;
    auto d = w.add_input( "d", 40 );
    auto i = w.add_input( "i", 3 );
    uint32_t amt = form == 0 ? w.add_cell( wkind::concat, { i, w.add_const( bitvec( 3 ) ) }, 6 )
                             : w.add_cell( wkind::shl, { w.add_cell( wkind::concat, { w.add_const( bitvec( 3 ) ), i }, 6 ), w.add_const( bitvec( 2, 3 ) ) }, 6 );
    w.add_output( "y", w.add_cell( wkind::shiftx, { d, amt }, 8 ) );
    auto mm = detect_strides( w );
    REQUIRE( mm.size() == 1 );
    CHECK( mm[0].stride == 8 );
    CHECK( mm[0].rewritable );
  }

  // i + 3 is no stride
  word_netlist w;
  auto d = w.add_input( "d", 16 );
  auto i = w.add_input( "i", 4 );
  w.add_output( "y", w.add_cell( wkind::shiftx, { d, w.add_cell( wkind::add, { i, w.add_const( bitvec( 4, 3 ) ) }, 4 ) }, 4 ) );
  CHECK( detect_strides( w ).empty() );
}

TEST_CASE( "96-bit data with 24-bit blocks is padded to 128 bits" )
{
  auto wn = lower_text( R"(
module t(input logic [95:0] d, input logic [1:0] i, output logic [23:0] y);
  assign y = d[i*24 +: 24];
endmodule)",
                        "t" );
  auto before = wn;
  CHECK( partselect_pass( wn ) == 1 );
  wn.validate();
  REQUIRE( wn.count( wkind::shiftx ) == 1 );
  CHECK( wn.count( wkind::mul ) == 0 );
  for ( const auto& c : wn.cells )
    if ( c.kind == wkind::shiftx )
    {
      CHECK( wn.width( c.out ) == 24 );
      CHECK( wn.width( c.in[0] ) == 128 );
      const auto& s = driver( wn, c.in[1] );
      CHECK( s.kind == wkind::shl );
      auto k = driver( wn, s.in[1] );
      REQUIRE( k.kind == wkind::const_ );
      CHECK( k.value.to_u64() == 5 );
    }
  check_equiv( before, wn );
}

TEST_CASE( "stride 8 becomes a shift by 3" )
{
  auto wn = lower_text( R"(
module t(input logic [31:0] d, input logic [1:0] i, output logic [7:0] y);
  assign y = d[i*8 +: 8];
endmodule)",
                        "t" );
  auto before = wn;
  CHECK( partselect_pass( wn ) == 1 );
  CHECK( wn.count( wkind::mul ) == 0 );
  check_equiv( before, wn );
}

TEST_CASE( "two matches rewritten in one run, variable strides untouched" )
{
  auto wn = lower_text( R"(
module t(input logic [59:0] d, input logic [2:0] i, input logic [3:0] j, input logic [2:0] s,
         output logic [11:0] y, output logic [4:0] z, output logic [3:0] v);
  assign y = d[i*12 +: 12];
  assign z = d[j*5 +: 5];
  assign v = d[i*s +: 4];
endmodule)",
                        "t" );
  auto before = wn;
  auto found = detect_strides( wn );
  CHECK( found.size() == 2 );
  CHECK( partselect_pass( wn ) == 2 );
  wn.validate();
  CHECK( wn.count( wkind::shiftx ) == 3 );
  CHECK( wn.count( wkind::mul ) == 1 );
  check_equiv( before, wn );
}

TEST_CASE( "blocks wider than the stride are left alone" )
{
  word_netlist w;
  auto d = w.add_input( "d", 30 );
  auto i = w.add_input( "i", 3 );
  auto amt = w.add_cell( wkind::mul, { i, w.add_const( bitvec( 3, 5 ) ) }, 5 );
  w.add_output( "y", w.add_cell( wkind::shiftx, { d, amt }, 7 ) );
  auto m = detect_strides( w );
  REQUIRE( m.size() == 1 );
  CHECK_FALSE( m[0].rewritable );
  auto text = dump_verilog( w );
  CHECK( partselect_pass( w ) == 0 );
  CHECK( dump_verilog( w ) == text );
}

TEST_CASE( "a wrapping amount is not rewritten" )
{
  // i*6 in 4 bits wraps for i >= 3
  word_netlist w;
  auto d = w.add_input( "d", 24 );
  auto i = w.add_input( "i", 2 );
  auto amt = w.add_cell( wkind::mul, { i, w.add_const( bitvec( 4, 6 ) ) }, 4 );
  w.add_output( "y", w.add_cell( wkind::shiftx, { d, amt }, 6 ) );
  auto before = w;
  CHECK( partselect_pass( w ) == 0 );
  check_equiv( before, w );
}

TEST_CASE( "shift-right then slice is recognized" )
{
  auto wn = lower_text( R"(
module t(input logic [47:0] d, input logic [2:0] i, output logic [5:0] y);
  logic [47:0] t0;
  assign t0 = d >> (i * 6);
  assign y = t0[5:0];
endmodule)",
                        "t" );
  auto before = wn;
  CHECK( partselect_pass( wn ) == 1 );
  CHECK( wn.count( wkind::shr ) == 0 );
  check_equiv( before, wn );
}

TEST_CASE( "no shiftx means no change" )
{
  auto wn = lower_text( R"(
module t(input logic [7:0] a, input logic [7:0] b, output logic [7:0] y);
  assign y = a + b;
endmodule)",
                        "t" );
  auto text = dump_verilog( wn );
  CHECK( partselect_pass( wn ) == 0 );
  CHECK( dump_verilog( wn ) == text );
}

TEST_CASE( "property: random stride selects stay equivalent" )
{
  uint64_t state = 12345;
  auto next = [&]( uint32_t lo, uint32_t hi ) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return lo + static_cast<uint32_t>( ( state >> 33 ) % ( hi - lo + 1 ) );
  };
  for ( int t = 0; t < 40; ++t )
  {
    uint32_t stride = next( 1, 13 ), w = next( 1, stride ), blocks = next( 1, 9 );
    uint32_t wd = stride * blocks - next( 0, stride - 1 ), iw = next( 1, 4 );
    CAPTURE( stride );
    CAPTURE( w );
    CAPTURE( wd );
    CAPTURE( iw );
    word_netlist wn;
    auto d = wn.add_input( "d", wd );
    auto i = wn.add_input( "i", iw );
    uint32_t aw = next( std::max<uint32_t>( iw, 5 ), 10 );
    auto amt = wn.add_cell( wkind::mul, { i, wn.add_const( bitvec( 5, stride ) ) }, aw );
    wn.add_output( "y", wn.add_cell( wkind::shiftx, { d, amt }, w ) );
    auto before = wn;
    partselect_pass( wn );
    wn.validate();
    check_equiv( before, wn );
  }
}
