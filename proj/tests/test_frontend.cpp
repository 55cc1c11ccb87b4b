#include <doctest.h>

#include "svsyn/frontend.hpp"

using namespace svsyn;

namespace
{

const char* counter_sv = R"(
module counter #(parameter int W = 8) (
  input logic clk,
  input logic en,
  output logic [W-1:0] q
);
  typedef enum logic [1:0] {IDLE, RUN, DONE = 2'd3} state_t;
  state_t st;
  always_ff @(posedge clk) begin
    if (en) q <= q + 1'b1;
    else q <= q;
  end
  always_comb begin
    case (q[1:0])
      2'd0, 2'd1: st = IDLE;
      default: st = RUN;
    endcase
  end
  for (genvar i = 0; i < 2; i++) begin : g
    logic t;
    assign t = q[i +: 1] ^ '1;
  end
  if (W > 4) begin
    assign q[0] = 1'b0;
  end else begin : small
  end
endmodule
)";

} // namespace

TEST_CASE( "minimal module parses to one module with one assign" )
{
  auto r = parse_text( "module a(input logic x, output logic y); assign y = ~x; endmodule" );
  REQUIRE( r.ok() );
  REQUIRE( r.design.modules.size() == 1 );
  const auto& m = r.design.modules[0];
  CHECK( m.name == "a" );
  CHECK( m.ports.size() == 2 );
  REQUIRE( m.items.size() == 1 );
  CHECK( std::holds_alternative<continuous_assign>( m.items[0].node ) );
}

TEST_CASE( "interfaces are rejected as unsupported" )
{
  auto r = parse_text( "interface I; endinterface", "i.sv" );
  REQUIRE_FALSE( r.ok() );
  CHECK( r.diags[0].code == "unsupported" );
  CHECK( r.diags[0].file == "i.sv" );
  CHECK( r.diags[0].line == 1 );
  CHECK( r.diags[0].format().rfind( "i.sv:1:1: error: unsupported construct: interface", 0 ) == 0 );
}

TEST_CASE( "out-of-subset constructs never yield an AST" )
{
  const char* bad[] = {
      "module m; initial begin end endmodule",
      "module m(input a); always @(a or b) y = a; endmodule",
      "module m; logic [3:0] mem [0:3]; endmodule",
      "module m; always_comb for (int i = 0; i < 2; i++) ; endmodule",
      "module m; function f; endfunction endmodule",
      "module m; assign y = 4'bx01z; endmodule",
      "module m; always_ff @(posedge clk or negedge rst) q <= 1; endmodule",
      "class C; endclass",
      "module m; assign y = $display(1); endmodule",
  };
  for ( const char* src : bad )
  {
    auto r = parse_text( src );
    CHECK_MESSAGE( !r.ok(), src );
    if ( !r.ok() )
      CHECK_MESSAGE( r.diags[0].code == "unsupported", src );
  }
}

TEST_CASE( "syntax errors carry a location" )
{
  auto r = parse_text( "module m;\n  assign y = ;\nendmodule\n", "s.sv" );
  REQUIRE_FALSE( r.ok() );
  CHECK( r.diags[0].code == "syntax" );
  CHECK( r.diags[0].line == 2 );
  CHECK( r.diags[0].column == 14 );
}

TEST_CASE( "duplicate module across files is diagnosed" )
{
  source_set s{ { { "a.sv", "module m; endmodule" }, { "b.sv", "module m; endmodule" } }, "m" };
  auto r = parse( s );
  REQUIRE_FALSE( r.ok() );
  CHECK( r.diags[0].code == "duplicate-module" );
  CHECK( r.diags[0].file == "b.sv" );
}

TEST_CASE( "instances must reference declared modules" )
{
  auto r = parse( source_set{ { { "a.sv", "module top; nope u(); endmodule" } }, "top" } );
  REQUIRE_FALSE( r.ok() );
  CHECK( r.diags[0].code == "unknown-module" );
}

TEST_CASE( "parse of emitted text is structurally equal" )
{
  auto r = parse_text( counter_sv );
  REQUIRE_MESSAGE( r.ok(), ( r.diags.empty() ? "" : r.diags[0].format() ) );
  auto text = emit( r.design );
  auto r2 = parse_text( text );
  REQUIRE_MESSAGE( r2.ok(), ( r2.diags.empty() ? "" : r2.diags[0].format() ) );
  CHECK( r2.design == r.design );
  CHECK( emit( r2.design ) == text );
}

TEST_CASE( "dangling else survives a print round trip" )
{
  auto r = parse_text( "module m(input logic a, b, output logic y); always_comb begin y = 0; if (a) begin if (b) y = 1; end else y = 2; end endmodule" );
  REQUIRE( r.ok() );
  auto r2 = parse_text( emit( r.design ) );
  REQUIRE( r2.ok() );
  CHECK( r2.design == r.design );
}

TEST_CASE( "pickle orders instantiated modules first" )
{
  source_set s{ { { "b.sv", "module b; a u(); endmodule" }, { "a.sv", "module a; endmodule" } }, "b" };
  auto text = pickle( s );
  CHECK( text.find( "module a" ) < text.find( "module b" ) );
  CHECK( pickle( s ) == text );
  auto r = parse_text( text );
  REQUIRE( r.ok() );
  CHECK( r.design.modules.size() == 2 );
}

TEST_CASE( "pickle of a single file keeps module bodies" )
{
  source_set s{ { { "c.sv", counter_sv } }, "counter" };
  auto text = pickle( s );
  auto once = parse_text( counter_sv );
  CHECK( text == emit( once.design ) );
}

TEST_CASE( "pickle reports instantiation cycles" )
{
  source_set s{ { { "x.sv", "module a; b u(); endmodule\nmodule b; a u(); endmodule" } }, "a" };
  try
  {
    pickle( s );
    FAIL( "expected a cycle error" );
  }
  catch ( const user_error& e )
  {
    CHECK( std::string( e.what() ).find( "a->b->a" ) != std::string::npos );
  }
}

TEST_CASE( "ties in dependency order break lexicographically" )
{
  auto r = parse_text( "module top; z u1(); y u2(); endmodule module z; endmodule module y; endmodule" );
  REQUIRE( r.ok() );
  CHECK( dependency_order( r.design ) == std::vector<std::string>{ "y", "z", "top" } );
}
