#include "svsyn/elaborate.hpp"
#include "svsyn/frontend.hpp"
#include "svsyn/verify.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace svsyn;

namespace
{

ast parse_ok( const std::string& text )
{
  auto r = parse_text( text, "t.sv" );
  REQUIRE_MESSAGE( r.ok(), ( r.diags.empty() ? std::string() : r.diags.front().format() ) );
  return r.design;
}

std::string elab_text( const std::string& text, const std::string& top, const param_env& ov = {} )
{
  return emit_verilog( elaborate( parse_ok( text ), top, ov ).design );
}

size_t count( const std::string& s, const std::string& sub )
{
  size_t n = 0;
  for ( auto p = s.find( sub ); p != std::string::npos; p = s.find( sub, p + 1 ) )
    ++n;
  return n;
}

std::string read_file( const std::filesystem::path& p )
{
  std::ifstream in( p );
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE( "override widens ports" )
{
  const char* src = "module m #(parameter int W = 8) (input logic [W-1:0] a, output logic [W-1:0] y);\n"
                    "  assign y = ~a;\nendmodule\n";
  auto v = elab_text( src, "m", { { "W", parse_param_value( "16" ) } } );
  CHECK( v.find( "[15:0] a" ) != std::string::npos );
  CHECK( count( v, "parameter" ) == 0 );
}

TEST_CASE( "clog2 folds to a literal" )
{
  const char* src = "module m (output logic [31:0] y);\n  localparam int A = $clog2(9);\n  assign y = A;\nendmodule\n";
  auto v = elab_text( src, "m" );
  CHECK( v.find( "$clog2" ) == std::string::npos );
  auto r = elaborate( parse_ok( src ), "m" );
  auto sim = make_ast_interpreter( r.design, "m" );
  auto out = simulate( *sim, { {} } );
  CHECK( out[0][0].to_u64() == 4 );
}

TEST_CASE( "two parameterizations become two modules" )
{
  const char* src = "module A #(parameter int W = 1) (input logic [W-1:0] x, output logic [W-1:0] y);\n"
                    "  assign y = x;\nendmodule\n"
                    "module t (input logic [3:0] a, output logic [3:0] b, output logic [7:0] c);\n"
                    "  A #(.W(4)) u0 (.x(a), .y(b));\n"
                    "  A #(.W(8)) u1 (.x({a, a}), .y(c));\n"
                    "  A #(.W(4)) u2 (.x(a), .y());\n"
                    "endmodule\n";
  auto r = elaborate( parse_ok( src ), "t" );
  std::vector<std::string> names;
  for ( const auto& m : r.design.modules )
    names.push_back( m.name );
  REQUIRE( names.size() == 3 );
  CHECK( names[0].rfind( "A__P", 0 ) == 0 );
  CHECK( names[1].rfind( "A__P", 0 ) == 0 );
  CHECK( names[0] != names[1] );
  CHECK( names[0].size() == 12 );
  CHECK( names[2] == "t" );
  auto j = nlohmann::json::parse( r.map_json );
  CHECK( j[names[0]]["module"] == "A" );
  CHECK( j.contains( "t" ) );
}

TEST_CASE( "instance key text and hash are stable" )
{
  elab_instance_key k{ "A", { { "W", parse_param_value( "16" ) } } };
  CHECK( k.text() == "A#(W=32'sh10)" );
  auto n = k.uniquified_name();
  CHECK( n.rfind( "A__P", 0 ) == 0 );
  CHECK( n == elab_instance_key{ "A", { { "W", parse_param_value( "16" ) } } }.uniquified_name() );
  CHECK( n != elab_instance_key{ "A", { { "W", parse_param_value( "17" ) } } }.uniquified_name() );
}

TEST_CASE( "generate for unrolls with index suffixes" )
{
  const char* src = "module m (input logic [2:0] a, output logic [2:0] y);\n"
                    "  for (genvar i = 0; i < 3; i++) begin : g\n"
                    "    logic t;\n    assign t = ~a[i];\n    assign y[i] = t;\n  end\nendmodule\n";
  auto v = elab_text( src, "m" );
  CHECK( v.find( "t__0" ) != std::string::npos );
  CHECK( v.find( "t__2" ) != std::string::npos );
  CHECK( v.find( "t__3" ) == std::string::npos );
  CHECK( count( v, "assign" ) == 6 );
  CHECK( v.find( "genvar" ) == std::string::npos );
}

TEST_CASE( "false generate-if emits nothing" )
{
  const char* src = "module m #(parameter bit E = 0) (input logic a, output logic y);\n"
                    "  assign y = a;\n  if (E) begin : g\n    logic dead;\n    assign dead = a;\n  end\nendmodule\n";
  auto v = elab_text( src, "m" );
  CHECK( v.find( "dead" ) == std::string::npos );
  CHECK( count( v, "assign" ) == 1 );
}

TEST_CASE( "nested loops get one suffix per level" )
{
  const char* src = "module m (input logic [3:0] a, output logic [3:0] y);\n"
                    "  for (genvar i = 0; i < 2; i++) begin : o\n"
                    "    for (genvar j = 0; j < 2; j++) begin : n\n"
                    "      logic t;\n      assign t = a[i*2+j];\n      assign y[i*2+j] = t;\n"
                    "    end\n  end\nendmodule\n";
  auto r = elaborate( parse_ok( src ), "m" );
  auto v = emit_verilog( r.design );
  for ( auto n : { "t__0__0", "t__0__1", "t__1__0", "t__1__1" } )
    CHECK( v.find( n ) != std::string::npos );
  auto j = nlohmann::json::parse( r.map_json );
  CHECK( j["m"]["names"]["t__1__0"] == "o[1].n[0].t" );
}

TEST_CASE( "always_comb lowers to always @* with reg target" )
{
  const char* src = "module m (input logic a, input logic b, output logic y);\n"
                    "  always_comb begin\n    y = a & b;\n  end\nendmodule\n";
  auto v = elab_text( src, "m" );
  CHECK( v.find( "always @*" ) != std::string::npos );
  CHECK( v.find( "output reg y" ) != std::string::npos );
  CHECK( v.find( "always_comb" ) == std::string::npos );
}

TEST_CASE( "enum members become localparams" )
{
  const char* src = "module m (input logic [1:0] s, output logic y);\n"
                    "  typedef enum logic [1:0] {A, B, C = 2'd3} st_t;\n"
                    "  assign y = s == C;\nendmodule\n";
  auto v = elab_text( src, "m" );
  CHECK( v.find( "typedef" ) == std::string::npos );
  CHECK( v.find( "localparam [1:0] C = 2'd3;" ) != std::string::npos );
  CHECK( count( v, "localparam" ) == 3 );
  CHECK( v.find( "s == 2'd3" ) != std::string::npos );
}

TEST_CASE( "no parameter keyword survives" )
{
  const char* src = "module leaf #(parameter W = 3) (input logic [W-1:0] x, output logic y);\n  assign y = ^x;\nendmodule\n"
                    "module m #(parameter int N = 5) (input logic [N-1:0] a, output logic y);\n"
                    "  leaf #(.W(N)) u (.x(a), .y(y));\nendmodule\n";
  auto v = elab_text( src, "m" );
  std::istringstream is( v );
  for ( std::string line; std::getline( is, line ); )
    CHECK( line.find( "parameter" ) == std::string::npos );
}

TEST_CASE( "elaboration errors" )
{
  CHECK_THROWS_AS( elab_text( "module m; localparam int A = B; localparam int B = A; endmodule\n", "m" ), user_error );
  CHECK_THROWS_AS( elab_text( "module m; localparam int A = A + 1; endmodule\n", "m" ), user_error );
  CHECK_THROWS_AS( elab_text( "module m (output logic y); assign y = nope; endmodule\n", "m" ), user_error );
  CHECK_THROWS_AS( elab_text( "module m; endmodule\n", "other" ), user_error );
  CHECK_THROWS_AS( elab_text( "module m #(parameter int W = 1) (); endmodule\n", "m", { { "X", parse_param_value( "1" ) } } ),
                   user_error );
  // runaway generate loop
  CHECK_THROWS_AS( elab_text( "module m (output logic y);\n  for (genvar i = 0; i >= 0; i++) begin : g\n  end\n"
                              "  assign y = 1'b0;\nendmodule\n",
                              "m" ),
                   user_error );
}

TEST_CASE( "unroll leaves unknown names alone" )
{
  auto d = parse_ok( "module m (input logic [3:0] a, output logic [3:0] y);\n"
                     "  for (genvar i = 0; i < N; i++) begin : g\n    assign y[i] = a[i];\n  end\nendmodule\n" );
  param_env env{ { "N", parse_param_value( "2" ) } };
  auto items = unroll( d.modules[0].items[0], env );
  CHECK( items.size() == 2 );
}

TEST_CASE( "corpus: elaborated output matches the source under simulation and is idempotent" )
{
  std::vector<std::filesystem::path> files;
  for ( const auto& e : std::filesystem::directory_iterator( std::string( SVSYN_CORPUS_DIR ) + "/elab" ) )
    if ( e.path().extension() == ".sv" )
      files.push_back( e.path() );
  std::sort( files.begin(), files.end() );
  REQUIRE( files.size() >= 15 );
  for ( const auto& f : files )
  {
    CAPTURE( f );
    auto top = f.stem().string();
    auto src = parse_ok( read_file( f ) );
    auto r = elaborate( src, top );
    auto v = emit_verilog( r.design );
    auto back = parse_text( v, "elab.v" );
    REQUIRE_MESSAGE( back.ok(), v );
    auto again = emit_verilog( elaborate( back.design, top ).design );
    CHECK( again == v );

    auto ref = make_ast_interpreter( src, top );
    auto dut = make_ast_interpreter( back.design, top );
    auto res = equiv_random( *ref, *dut, 512, 7 );
    CHECK_MESSAGE( res.result == verdict::equivalent, dump_counterexample( res, ref->sig() ) );
  }
}

