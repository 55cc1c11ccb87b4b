#include "svsyn/flow.hpp"
#include "svsyn/frontend.hpp"
#include "svsyn/verify.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace svsyn;
namespace fs = std::filesystem;

namespace
{

std::string read_file( const fs::path& p )
{
  std::ifstream in( p, std::ios::binary );
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ast load( const std::string& rel )
{
  auto p = fs::path( SVSYN_CORPUS_DIR ) / rel;
  auto r = parse_text( read_file( p ), p.string() );
  REQUIRE( r.ok() );
  return r.design;
}

std::vector<fs::path> corpus( const std::string& dir )
{
  std::vector<fs::path> out;
  for ( const auto& e : fs::directory_iterator( fs::path( SVSYN_CORPUS_DIR ) / dir ) )
    if ( e.path().extension() == ".sv" )
      out.push_back( e.path() );
  std::sort( out.begin(), out.end() );
  return out;
}

} // namespace

TEST_CASE( "config: keys, defaults and rejection" )
{
  auto c = flow_config::from_json( R"j({"name":"x","top":"t","partselect":false,"adder.policy":"balanced(8)",
                                      "adder.overrides":{"$add$1":"kogge_stone"},"map.objective":"delay"})j" );
  CHECK( c.name == "x" );
  CHECK( !c.partselect );
  CHECK( c.lms );
  CHECK( c.policy.text() == "balanced(8)" );
  CHECK( c.overrides.at( "$add$1" ) == adder_arch::kogge_stone );
  CHECK( c.resolved_map_objective() == map_objective::delay );
  CHECK( c.resolved_lms_objective() == rewrite_objective::area );

  auto d = flow_config::from_json( R"({"adder.policy":"min_delay"})" );
  CHECK( d.resolved_map_objective() == map_objective::delay );
  CHECK( d.resolved_lms_objective() == rewrite_objective::depth );

  // round trip through to_json
  auto again = flow_config::from_json( c.to_json() );
  CHECK( again.to_json() == c.to_json() );

  CHECK_THROWS_AS( flow_config::from_json( R"({"bogus":1})" ), user_error );
  CHECK_THROWS_AS( flow_config::from_json( R"({"lms":"yes"})" ), user_error );
  CHECK_THROWS_AS( flow_config::from_json( R"({"adder.policy":"fast"})" ), user_error );
  CHECK_THROWS_AS( flow_config::from_json( R"({"adder.default":"carry_skip"})" ), user_error );
  CHECK_THROWS_AS( flow_config::from_json( R"({"lms.db":"/nonexistent/db.txt"})" ), user_error );
  CHECK_THROWS_AS( flow_config::from_json( "[1,2]" ), user_error );
  CHECK_THROWS_AS( flow_config::from_json( "{" ), user_error );
}

TEST_CASE( "flow: every corpus design keeps its function" )
{
  auto lib = cell_library::default_library();
  uint32_t n = 0;
  for ( const auto& dir : { "elab", "naive", "partselect" } )
    for ( const auto& p : corpus( dir ) )
    {
      auto top = p.stem().string();
      CAPTURE( top );
      auto design = load( std::string( dir ) + "/" + p.filename().string() );
      flow_config cfg;
      cfg.top = top;
      cfg.policy = arch_policy::parse( n % 3 == 0 ? "min_area" : n % 3 == 1 ? "balanced(4)" : "min_delay" );
      auto r = run_flow( design, cfg, lib );
      auto ref = make_ast_interpreter( design, top );
      auto dut = make_aig_simulator( to_aig( r.netlist, lib ) );
      auto e = equiv_exhaustive( *ref, *dut, { 16, 6 } );
      if ( e.result == verdict::inconclusive )
        e = equiv_random( *ref, *dut, 256, 11, { 16, 6 } );
      CHECK_MESSAGE( e.result == verdict::equivalent, dump_counterexample( e, ref->sig() ) );
      ++n;
    }
  CHECK( n >= 30 );
}

TEST_CASE( "flow: pass record and QoR report" )
{
  auto lib = cell_library::default_library();
  auto design = load( "partselect/ps_s3_b5.sv" );
  flow_config cfg;
  cfg.top = "ps_s3_b5";
  cfg.lms = false;
  auto r = run_flow( design, cfg, lib );

  std::vector<std::string> order;
  for ( const auto& p : r.passes )
    order.push_back( p.pass );
  CHECK( order == std::vector<std::string>{ "lower", "const_fold", "partselect", "fuse_mac", "bitblast", "lms", "map", "sta" } );
  CHECK( r.passes[2].changes == 1 );
  CHECK( !r.passes[5].enabled );
  CHECK( r.passes[5].before == r.passes[5].after );

  auto j = nlohmann::json::parse( r.qor_json( cfg ) );
  for ( const char* k : { "design", "config", "selection", "area_ge", "cells", "critical_path_ns", "fmax_mhz",
                          "startpoint", "endpoint", "path", "slack", "pass_stats" } )
    CHECK_MESSAGE( j.contains( k ), k );
  CHECK( j["config"]["lms"] == false );
  CHECK( j["area_ge"].get<double>() == doctest::Approx( r.area.total_ge ) );
  double sum = 0;
  for ( const auto& s : j["path"] )
    sum += s["delay_ns"].get<double>();
  CHECK( sum == doctest::Approx( j["critical_path_ns"].get<double>() ) );

  // byte-identical on a second run
  CHECK( run_flow( design, cfg, lib ).qor_json( cfg ) == r.qor_json( cfg ) );
}

TEST_CASE( "flow: errors are user errors" )
{
  auto lib = cell_library::default_library();
  auto design = load( "naive/naive_maj.sv" );
  flow_config cfg;
  CHECK_THROWS_AS( run_flow( design, cfg, lib ), user_error );
  cfg.top = "missing";
  CHECK_THROWS_AS( run_flow( design, cfg, lib ), user_error );
}

TEST_CASE( "flow: part-select pass never costs area on its corpus" )
{
  auto lib = cell_library::default_library();
  for ( const auto& p : corpus( "partselect" ) )
  {
    auto top = p.stem().string();
    CAPTURE( top );
    auto design = load( "partselect/" + p.filename().string() );
    flow_config on, off;
    on.top = off.top = top;
    off.partselect = false;
    on.lms = off.lms = false;
    CHECK( run_flow( design, on, lib ).area.total_ge <= run_flow( design, off, lib ).area.total_ge );
  }
}

TEST_CASE( "sweep: pareto flags and CSV" )
{
  auto lib = cell_library::default_library();
  auto design = load( "naive/naive_xor3.sv" );
  auto configs = default_sweep_configs( "naive_xor3" );
  REQUIRE( configs.size() == 6 );
  flow_config bad;
  bad.name = "bad";
  bad.top = "nope";
  configs.push_back( bad );
  auto rows = at_sweep( design, configs, lib, nullptr, 3 );
  REQUIRE( rows.size() == 7 );
  CHECK( !rows[6].ok );
  for ( const auto& a : rows )
  {
    if ( !a.ok )
      continue;
    // a pareto row is dominated by nothing; a non-pareto row by something
    bool dominated = false;
    for ( const auto& b : rows )
      if ( b.ok && b.area_ge <= a.area_ge && b.delay_ns <= a.delay_ns && ( b.area_ge < a.area_ge || b.delay_ns < a.delay_ns ) )
        dominated = true;
    CHECK( a.pareto == !dominated );
  }
  auto csv = sweep_csv( rows );
  CHECK( csv.rfind( "config,area_ge,delay_ns,pareto\n", 0 ) == 0 );
  CHECK( csv.find( "bad,error,error,0\n" ) != std::string::npos );
  CHECK( sweep_csv( at_sweep( design, configs, lib, nullptr, 1 ) ) == csv );
}
