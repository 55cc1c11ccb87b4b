/*! \brief Acceptance run: one PASS/FAIL line per criterion. Extra arguments
 * are test executables run as child processes for the suite-wide budget. */

#include "svsyn/arith.hpp"
#include "svsyn/elaborate.hpp"
#include "svsyn/flow.hpp"
#include "svsyn/frontend.hpp"
#include "svsyn/lms.hpp"
#include "svsyn/partselect.hpp"
#include "svsyn/techmap.hpp"
#include "svsyn/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <sys/resource.h>
#include <sys/wait.h>

using namespace svsyn;
namespace fs = std::filesystem;

namespace
{

/* pinned limits */
constexpr double c1_limit_s = 10;
constexpr uint32_t c1_min_designs = 15;
constexpr uint32_t c1_min_deep = 3;
constexpr uint32_t c1_vectors = 100;
constexpr uint32_t c1_cycles = 16;
constexpr double c2_limit_s = 60;
constexpr double c3_limit_s = 120;
constexpr double c3_min_geomean_reduction = 0.10;
constexpr uint32_t exhaustive_cap_bits = 20;
constexpr uint64_t random_vectors = 100000;
constexpr double c4_limit_s = 180;
constexpr double c4_min_naive_reduction = 0.05;
constexpr double c5_limit_s = 120;
constexpr double c6_limit_s = 180;
constexpr uint32_t c6_min_points = 3;
constexpr double c8_limit_s = 900;
constexpr double c8_limit_mb = 4096;

using clock_type = std::chrono::steady_clock;

double seconds_since( clock_type::time_point t0 )
{
  return std::chrono::duration<double>( clock_type::now() - t0 ).count();
}

std::string read_file( const fs::path& p )
{
  std::ifstream in( p, std::ios::binary );
  if ( !in )
    throw user_error( "cannot read " + p.string() );
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt( const char* f, ... ) __attribute__( ( format( printf, 1, 2 ) ) );
std::string fmt( const char* f, ... )
{
  char buf[512];
  va_list ap;
  va_start( ap, f );
  std::vsnprintf( buf, sizeof( buf ), f, ap );
  va_end( ap );
  return buf;
}

struct design_file
{
  std::string top;
  fs::path path;
  ast design;
};

std::vector<design_file> corpus( const std::string& dir )
{
  std::vector<fs::path> paths;
  for ( const auto& e : fs::directory_iterator( fs::path( SVSYN_CORPUS_DIR ) / dir ) )
    if ( e.path().extension() == ".sv" )
      paths.push_back( e.path() );
  std::sort( paths.begin(), paths.end() );
  std::vector<design_file> out;
  for ( const auto& p : paths )
  {
    auto r = parse_text( read_file( p ), p.string() );
    if ( !r.ok() )
      throw user_error( r.diags.front().format() );
    out.push_back( { p.stem().string(), p, std::move( r.design ) } );
  }
  return out;
}

word_netlist lower( const ast& design, const std::string& top )
{
  auto el = elaborate( design, top );
  auto wn = lower_words( el.design, el.top );
  const_fold( wn );
  return wn;
}

/* exhaustive up to the cap, seeded random above it */
equiv_result check( sim_model& a, sim_model& b, uint64_t seed, uint32_t cycles = 8 )
{
  auto r = equiv_exhaustive( a, b, { exhaustive_cap_bits, cycles } );
  if ( r.result == verdict::inconclusive )
    r = equiv_random( a, b, random_vectors, seed, { exhaustive_cap_bits, cycles } );
  return r;
}

struct outcome
{
  bool pass = false;
  std::string detail;
};

/* 1: pre-elaboration */

uint32_t param_levels( const ast& design, const std::string& module )
{
  const auto* m = design.find( module );
  if ( !m )
    return 0;
  uint32_t best = 1;
  for ( const auto* inst : instances_of( *m ) )
    if ( !inst->params.empty() )
      best = std::max( best, 1 + param_levels( design, inst->module ) );
  return best;
}

/* parameters, generates and non-literal localparams; a localparam may stay as a pure literal */
bool residual_constructs( const std::string& v )
{
  static const std::regex literal( R"(^-?([0-9]+|[0-9]*'[sS]?[bodhBODH][0-9a-fA-F_]+)$)" );
  std::istringstream lines( v );
  std::string line;
  while ( std::getline( lines, line ) )
  {
    std::istringstream in( line );
    std::string tok;
    while ( in >> tok )
    {
      for ( const char* bad : { "parameter", "defparam", "generate", "endgenerate", "genvar" } )
        if ( tok == bad )
          return true;
      if ( tok == "localparam" )
      {
        auto eq = line.find( '=' ), semi = line.rfind( ';' );
        if ( eq == std::string::npos || semi == std::string::npos || semi < eq )
          return true;
        auto value = line.substr( eq + 1, semi - eq - 1 );
        value.erase( std::remove_if( value.begin(), value.end(), ::isspace ), value.end() );
        if ( !std::regex_match( value, literal ) )
          return true;
      }
    }
  }
  return v.find( "#(" ) != std::string::npos;
}

outcome criterion1()
{
  auto t0 = clock_type::now();
  uint32_t designs = 0, deep = 0, clean = 0, equivalent = 0;
  std::string failures;
  for ( const auto& d : corpus( "elab" ) )
  {
    ++designs;
    if ( param_levels( d.design, d.top ) >= 3 )
      ++deep;
    auto el = elaborate( d.design, d.top );
    auto v = emit_verilog( el.design );
    if ( !residual_constructs( v ) )
      ++clean;
    else
      failures += " residual:" + d.top;
    auto back = parse_text( v, d.top + ".v" );
    if ( !back.ok() )
    {
      failures += " reparse:" + d.top;
      continue;
    }
    auto ref = make_ast_interpreter( d.design, d.top );
    auto dut = make_ast_interpreter( back.design, d.top );
    auto r = equiv_random( *ref, *dut, c1_vectors, 1, { 0, c1_cycles } );
    if ( r.result == verdict::equivalent )
      ++equivalent;
    else
      failures += " mismatch:" + d.top;
  }
  double s = seconds_since( t0 );
  bool pass = designs >= c1_min_designs && deep >= c1_min_deep && clean == designs && equivalent == designs &&
              s < c1_limit_s;
  return { pass, fmt( "%u designs (>= %u), %u with >= 3 parameter levels (>= %u), %u/%u free of parameters, "
                      "generates and non-literal localparams, %u/%u equivalent over %u vectors x %u cycles, %.2f s (< %.0f s)",
                      designs, c1_min_designs, deep, c1_min_deep, clean, designs, equivalent, designs, c1_vectors,
                      c1_cycles, s, c1_limit_s ) +
                  failures };
}

/* 2: NPN classes */

/* orbit marking: every function of a class is visited exactly once */
uint32_t orbit_count( uint32_t k )
{
  const uint64_t n = uint64_t( 1 ) << ( 1u << k );
  std::vector<bool> seen( n, false );
  std::vector<npn_transform> all;
  std::array<uint8_t, 6> p{ 0, 1, 2, 3, 4, 5 };
  do
    for ( uint32_t neg = 0; neg < ( 1u << k ); ++neg )
      for ( bool o : { false, true } )
        all.push_back( { p, static_cast<uint8_t>( neg ), o } );
  while ( std::next_permutation( p.begin(), p.begin() + k ) );
  uint32_t classes = 0;
  for ( uint64_t f = 0; f < n; ++f )
  {
    if ( seen[f] )
      continue;
    ++classes;
    for ( const auto& t : all )
      seen[npn_apply( { k, f }, t ).bits] = true;
  }
  return classes;
}

outcome criterion2()
{
  auto t0 = clock_type::now();
  const uint32_t expected[] = { 4, 14, 222 };
  bool ok = true;
  std::string d;
  for ( uint32_t k = 2; k <= 4; ++k )
  {
    uint32_t oracle = orbit_count( k ), lib = count_npn_classes( k );
    ok = ok && oracle == expected[k - 2] && lib == expected[k - 2];
    d += fmt( "k=%u: %u orbits / %u canonical (expect %u); ", k, oracle, lib, expected[k - 2] );
  }
  double s = seconds_since( t0 );
  return { ok && s < c2_limit_s, d + fmt( "%.2f s (< %.0f s)", s, c2_limit_s ) };
}

/* 3: part-select pass */

outcome criterion3()
{
  auto t0 = clock_type::now();
  auto lib = cell_library::default_library();
  double log_sum = 0;
  uint32_t cases = 0, not_worse = 0, equivalent = 0;
  std::string d;
  for ( const auto& c : corpus( "partselect" ) )
  {
    ++cases;
    flow_config on, off;
    on.top = off.top = c.top;
    off.partselect = false;
    auto ron = run_flow( c.design, on, lib );
    auto roff = run_flow( c.design, off, lib );
    double a = ron.area.total_ge, b = roff.area.total_ge;
    if ( a <= b )
      ++not_worse;
    log_sum += std::log( a / b );

    auto ref = lower( c.design, c.top );
    auto sa = make_word_simulator( ref );
    auto sb = make_aig_simulator( to_aig( ron.netlist, lib ) );
    auto r = check( *sa, *sb, 3 );
    if ( r.result == verdict::equivalent )
      ++equivalent;
    else
      d += " mismatch:" + c.top;
  }
  double reduction = cases ? 1 - std::exp( log_sum / cases ) : 0;
  double s = seconds_since( t0 );
  bool pass = cases == 10 && not_worse == cases && equivalent == cases && reduction >= c3_min_geomean_reduction &&
              s < c3_limit_s;
  return { pass, fmt( "%u cases, %u/%u with pass GE <= without, geomean GE reduction %.1f%% (>= %.0f%%), %u/%u "
                      "equivalent, %.2f s (< %.0f s)",
                      cases, not_worse, cases, 100 * reduction, 100 * c3_min_geomean_reduction, equivalent, cases, s,
                      c3_limit_s ) +
                  d };
}

/* 4: LMS rewriting */

outcome criterion4( std::string& db_text )
{
  auto t0 = clock_type::now();
  std::vector<std::pair<std::string, std::vector<design_file>>> sets;
  for ( const char* dir : { "elab", "naive", "partselect", "bench" } )
    sets.emplace_back( dir, corpus( dir ) );

  std::set<truth_table> extra;
  for ( const auto& [dir, files] : sets )
    for ( const auto& f : files )
    {
      auto h = harvest_design( f.design, f.top );
      extra.insert( h.begin(), h.end() );
    }
  auto db = build_database( 3, extra );
  db_text = db.save();

  uint32_t designs = 0, monotone = 0, equivalent = 0;
  uint64_t naive_before = 0, naive_after = 0;
  std::string d;
  for ( const auto& [dir, files] : sets )
    for ( const auto& f : files )
    {
      ++designs;
      auto wn = lower( f.design, f.top );
      auto g = bitblast( wn, select_arch( wn, arch_policy{} ) );
      auto before = g;
      auto st = rewrite( g, db, rewrite_objective::area );
      if ( st.nodes_after <= st.nodes_before && g.num_ands() <= before.num_ands() )
        ++monotone;
      else
        d += " grew:" + f.top;
      if ( dir == "naive" )
      {
        naive_before += before.num_ands();
        naive_after += g.num_ands();
      }
      auto sa = make_aig_simulator( before ), sb = make_aig_simulator( g );
      auto r = check( *sa, *sb, 4 );
      if ( r.result == verdict::equivalent )
        ++equivalent;
      else
        d += " mismatch:" + f.top;
    }
  double reduction = naive_before ? 1 - double( naive_after ) / double( naive_before ) : 0;
  double s = seconds_since( t0 );
  bool pass = monotone == designs && equivalent == designs && reduction >= c4_min_naive_reduction && s < c4_limit_s;
  return { pass, fmt( "DB %zu entries (%zu harvested classes), %u/%u designs non-increasing, naive corpus %llu -> %llu "
                      "nodes (-%.1f%%, >= %.0f%%), %u/%u equivalent, %.2f s (< %.0f s)",
                      db.size(), extra.size(), monotone, designs, (unsigned long long)naive_before,
                      (unsigned long long)naive_after, 100 * reduction, 100 * c4_min_naive_reduction, equivalent,
                      designs, s, c4_limit_s ) +
                  d };
}

/* 5: arithmetic */

uint64_t mask( uint32_t w ) { return w >= 64 ? ~uint64_t( 0 ) : ( uint64_t( 1 ) << w ) - 1; }
int64_t sext( uint64_t v, uint32_t w ) { return w >= 64 ? int64_t( v ) : int64_t( v << ( 64 - w ) ) >> ( 64 - w ); }

/* runs `g` exhaustively over its inputs (in pi order, LSB first); `ref` maps the packed input to the packed output */
bool exhaustive_ok( const aig& g, const std::function<uint64_t( uint64_t )>& ref )
{
  const uint32_t n = static_cast<uint32_t>( g.pis().size() );
  const uint64_t rows = uint64_t( 1 ) << n;
  for ( uint64_t base = 0; base < rows; base += 64 )
  {
    std::vector<uint64_t> ci( n, 0 );
    for ( uint64_t r = 0; r < 64 && base + r < rows; ++r )
      for ( uint32_t i = 0; i < n; ++i )
        ci[i] |= ( ( ( base + r ) >> i ) & 1 ) << r;
    auto v = simulate_nodes( g, ci );
    for ( uint64_t r = 0; r < 64 && base + r < rows; ++r )
    {
      uint64_t out = 0;
      for ( size_t o = 0; o < g.pos().size(); ++o )
      {
        lit l = g.pos()[o].l;
        uint64_t w = v[lit_node( l )] ^ ( lit_compl( l ) ? ~uint64_t( 0 ) : 0 );
        out |= ( ( w >> r ) & 1 ) << o;
      }
      if ( out != ref( base + r ) )
        return false;
    }
  }
  return true;
}

aig fma_generator( uint32_t wa, uint32_t wb, uint32_t wc, bool sgn, adder_arch arch )
{
  aig g;
  word a, b, c;
  for ( uint32_t i = 0; i < wa; ++i )
    a.push_back( g.add_pi( "a" ) );
  for ( uint32_t i = 0; i < wb; ++i )
    b.push_back( g.add_pi( "b" ) );
  for ( uint32_t i = 0; i < wc; ++i )
    c.push_back( g.add_pi( "c" ) );
  auto r = build_booth_multiplier( g, a, b, sgn, wc, arch, &c );
  for ( auto l : r.product )
    g.add_po( l, "y" );
  return g;
}

flow_result run_text( const std::string& text, const std::string& top, const flow_config& base )
{
  auto r = parse_text( text, top + ".sv" );
  if ( !r.ok() )
    throw user_error( r.diags.front().format() );
  auto cfg = base;
  cfg.top = top;
  return run_flow( r.design, cfg, cell_library::default_library() );
}

outcome criterion5()
{
  auto t0 = clock_type::now();
  const adder_arch archs[] = { adder_arch::ripple, adder_arch::sklansky, adder_arch::kogge_stone, adder_arch::brent_kung };
  uint32_t generators = 0, correct = 0;
  std::string d;
  for ( auto arch : archs )
  {
    for ( uint32_t w = 1; w <= 8; ++w )
    {
      ++generators;
      auto g = gen_adder( w, arch, true );
      // pis: a, b, cin; pos: s, cout
      if ( exhaustive_ok( g, [w]( uint64_t x ) {
             uint64_t a = x & mask( w ), b = ( x >> w ) & mask( w ), c = ( x >> ( 2 * w ) ) & 1;
             return ( a + b + c ) & mask( w + 1 );
           } ) )
        ++correct;
      else
        d += fmt( " adder:%s/%u", arch_name( arch ), w );
    }
    for ( bool sgn : { false, true } )
      for ( uint32_t wa = 1; wa <= 8; ++wa )
        for ( uint32_t wb = 1; wb <= 8; ++wb )
        {
          ++generators;
          auto g = gen_booth_multiplier( wa, wb, sgn, arch );
          if ( exhaustive_ok( g, [=]( uint64_t x ) {
                 uint64_t a = x & mask( wa ), b = ( x >> wa ) & mask( wb );
                 int64_t p = sgn ? sext( a, wa ) * sext( b, wb ) : int64_t( a * b );
                 return uint64_t( p ) & mask( wa + wb );
               } ) )
            ++correct;
          else
            d += fmt( " booth:%s/%ux%u%s", arch_name( arch ), wa, wb, sgn ? "s" : "u" );
        }
    for ( bool sgn : { false, true } )
      for ( uint32_t w : { 2u, 3u, 4u } )
      {
        ++generators;
        const uint32_t wc = 2 * w;
        auto g = fma_generator( w, w, wc, sgn, arch );
        if ( exhaustive_ok( g, [=]( uint64_t x ) {
               uint64_t a = x & mask( w ), b = ( x >> w ) & mask( w ), c = ( x >> ( 2 * w ) ) & mask( wc );
               int64_t p = sgn ? sext( a, w ) * sext( b, w ) : int64_t( a * b );
               return ( uint64_t( p ) + c ) & mask( wc );
             } ) )
          ++correct;
        else
          d += fmt( " fma:%s/%u%s", arch_name( arch ), w, sgn ? "s" : "u" );
      }
  }

  // the MAC under the shipped delay model, delay-oriented flow, fused vs not
  const std::string mac = read_file( fs::path( SVSYN_CORPUS_DIR ) / "bench" / "mac16.sv" );
  flow_config fused;
  fused.policy = arch_policy::parse( "min_delay" );
  fused.lms = false;
  auto unfused = fused;
  unfused.fuse = false;
  auto rf = run_text( mac, "mac16", fused ), ru = run_text( mac, "mac16", unfused );
  bool fma_used = rf.passes[3].changes == 1 && ru.passes[3].changes == 0;
  double dfma = rf.timing.critical_path_ns, dsep = ru.timing.critical_path_ns;

  // 32-bit adders
  const std::string add32 = "module add32 (input logic [31:0] a, input logic [31:0] b, output logic [31:0] y);\n"
                            "  assign y = a + b;\nendmodule\n";
  flow_config rc;
  rc.lms = false;
  rc.map_mode = "area";
  rc.default_arch = adder_arch::ripple;
  auto kc = rc;
  kc.default_arch = adder_arch::kogge_stone;
  auto rr = run_text( add32, "add32", rc ), rk = run_text( add32, "add32", kc );

  double s = seconds_since( t0 );
  bool pass = correct == generators && fma_used && dfma < dsep && rr.area.total_ge < rk.area.total_ge &&
              rk.timing.critical_path_ns < rr.timing.critical_path_ns && s < c5_limit_s;
  return { pass, fmt( "%u/%u generators exhaustively correct (width <= 8), MAC16 critical path fused %.3f ns < "
                      "Booth+adder %.3f ns, add32 ripple %.2f GE / %.3f ns vs kogge_stone %.2f GE / %.3f ns, %.2f s "
                      "(< %.0f s)",
                      correct, generators, dfma, dsep, rr.area.total_ge, rr.timing.critical_path_ns, rk.area.total_ge,
                      rk.timing.critical_path_ns, s, c5_limit_s ) +
                  ( fma_used ? "" : " fusion not applied as configured" ) + d };
}

/* 6: area-delay sweep */

outcome criterion6( std::string& csv )
{
  auto t0 = clock_type::now();
  auto mac = corpus( "bench" );
  auto it = std::find_if( mac.begin(), mac.end(), []( const auto& f ) { return f.top == "mac16"; } );
  if ( it == mac.end() )
    return { false, "mac16 benchmark missing" };
  auto rows = at_sweep( it->design, default_sweep_configs( "mac16" ), cell_library::default_library(), nullptr,
                        std::max( 1u, std::thread::hardware_concurrency() ) );
  csv = sweep_csv( rows );
  std::set<std::pair<double, double>> points;
  for ( const auto& r : rows )
    if ( r.ok && r.pareto )
      points.insert( { r.area_ge, r.delay_ns } );
  bool decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  std::string list;
  for ( const auto& [a, dl] : points )
  {
    decreasing = decreasing && dl < prev;
    prev = dl;
    list += fmt( " (%.2f GE, %.3f ns)", a, dl );
  }
  double s = seconds_since( t0 );
  bool pass = points.size() >= c6_min_points && decreasing && s < c6_limit_s;
  return { pass, fmt( "%zu distinct pareto points (>= %u), delay strictly decreasing with area: %s,%s; %.2f s (< %.0f s)",
                      points.size(), c6_min_points, decreasing ? "yes" : "no", list.c_str(), s, c6_limit_s ) };
}

/* 7: determinism and formats */

outcome criterion7( const std::string& db_text, const std::string& csv )
{
  auto t0 = clock_type::now();
  std::vector<std::string> bad;
  auto expect = [&]( bool ok, const std::string& what ) {
    if ( !ok )
      bad.push_back( what );
  };
  uint32_t checks = 0;

  // pickles and .v from fresh parses
  for ( const auto& d : corpus( "elab" ) )
  {
    source_set s;
    s.files.push_back( { d.path.string(), read_file( d.path ) } );
    expect( pickle( s ) == pickle( s ), "pickle:" + d.top );
    auto v1 = emit_verilog( elaborate( parse_text( read_file( d.path ), d.path.string() ).design, d.top ).design );
    auto v2 = emit_verilog( elaborate( parse_text( read_file( d.path ), d.path.string() ).design, d.top ).design );
    expect( v1 == v2, "verilog:" + d.top );
    checks += 2;
  }

  // databases
  auto small1 = build_database( 3 ).save(), small2 = build_database( 3 ).save();
  expect( small1 == small2, "db rebuild" );
  expect( lms_db::load( small1 ).save() == small1, "db round trip (k<=3)" );
  expect( lms_db::load( db_text ).save() == db_text, "db round trip (harvested)" );
  checks += 3;

  // library
  auto lib = cell_library::default_library();
  auto lj = lib.to_json();
  expect( cell_library::from_json( lj ).to_json() == lj, "library round trip" );
  ++checks;

  // qor.json
  for ( const char* rel : { "bench/mac16.sv", "partselect/ps_s7_b9.sv", "elab/pipeline.sv" } )
  {
    auto p = fs::path( SVSYN_CORPUS_DIR ) / rel;
    auto design = parse_text( read_file( p ), p.string() ).design;
    flow_config cfg;
    cfg.top = p.stem().string();
    cfg.seed = 7;
    expect( run_flow( design, cfg, lib ).qor_json( cfg ) == run_flow( design, cfg, lib ).qor_json( cfg ),
            std::string( "qor:" ) + rel );
    ++checks;
  }

  // at.csv, serial against the parallel run of criterion 6
  auto mac = corpus( "bench" );
  auto serial = sweep_csv( at_sweep( mac.front().design, default_sweep_configs( "mac16" ), lib, nullptr, 1 ) );
  expect( serial == csv, "at.csv serial vs parallel" );
  ++checks;

  double s = seconds_since( t0 );
  std::string d = fmt( "%u byte-identity checks, %zu differ, %.2f s", checks, bad.size(), s );
  for ( const auto& b : bad )
    d += " " + b;
  return { bad.empty(), d };
}

/* 8: resources */

double peak_rss_mb()
{
  rusage self{}, kids{};
  getrusage( RUSAGE_SELF, &self );
  getrusage( RUSAGE_CHILDREN, &kids );
  return std::max( self.ru_maxrss, kids.ru_maxrss ) / 1024.0;
}

} // namespace

int main( int argc, char** argv )
{
  auto t0 = clock_type::now();
  std::vector<std::pair<std::string, outcome>> results;
  auto run = [&]( const std::string& name, const std::function<outcome()>& f ) {
    outcome o;
    try
    {
      o = f();
    }
    catch ( const std::exception& e )
    {
      o = { false, std::string( "exception: " ) + e.what() };
    }
    results.emplace_back( name, o );
    std::cout << ( o.pass ? "PASS" : "FAIL" ) << " [" << results.size() << "] " << name << ": " << o.detail << std::endl;
  };

  std::string db_text, csv;
  run( "pre-elaboration", criterion1 );
  run( "NPN classes", criterion2 );
  run( "part-select pass", criterion3 );
  run( "LMS rewriting", [&] { return criterion4( db_text ); } );
  run( "arithmetic library", criterion5 );
  run( "area-delay sweep", [&] { return criterion6( csv ); } );
  run( "determinism and formats", [&] { return criterion7( db_text, csv ); } );
  run( "suite resources", [&] {
    uint32_t failed = 0;
    for ( int i = 1; i < argc; ++i )
    {
      std::string cmd = std::string( argv[i] ) + " >/dev/null 2>&1";
      int st = std::system( cmd.c_str() );
      if ( !WIFEXITED( st ) || WEXITSTATUS( st ) != 0 )
        ++failed;
    }
    double s = seconds_since( t0 ), mb = peak_rss_mb();
    return outcome{ failed == 0 && s < c8_limit_s && mb < c8_limit_mb,
                    fmt( "%d test programs (%u failed) plus this run: %.2f s wall (< %.0f s), peak RSS %.1f MB (< %.0f MB)",
                         argc - 1, failed, s, c8_limit_s, mb, c8_limit_mb ) };
  } );

  uint32_t passed = 0;
  for ( const auto& [name, o] : results )
    passed += o.pass ? 1 : 0;
  std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
  return passed == results.size() ? 0 : 1;
}
