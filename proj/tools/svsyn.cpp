#include "svsyn/diagnostic.hpp"
#include "svsyn/elaborate.hpp"
#include "svsyn/flow.hpp"
#include "svsyn/frontend.hpp"
#include "svsyn/lms.hpp"
#include "svsyn/techmap.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace svsyn;
namespace fs = std::filesystem;

namespace
{

const char* about_text =
    "svsyn: a small open synthesis flow for a SystemVerilog subset.\n"
    "  pickle   concatenate a multi-file design in dependency order\n"
    "  elab     resolve parameters and generates into plain Verilog-2005\n"
    "  synth    lower, optimize, map to the cell library and report QoR\n"
    "  lmsdb    build or inspect the rewriting database\n"
    "  sweep    run several configurations and mark the area-delay pareto points\n"
    "Area is reported in gate equivalents (NAND2 = 1 GE), delay in ns under a\n"
    "constant pin-to-output delay model. Results are not comparable to signoff\n"
    "numbers from a commercial flow.\n";

std::string read_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw user_error( "cannot read '" + path + "'" );
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file( const std::string& path, const std::string& text )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw user_error( "cannot write '" + path + "'" );
  out << text;
  if ( !out )
    throw user_error( "write failed: '" + path + "'" );
}

void emit( const std::string& path, const std::string& text )
{
  if ( path.empty() || path == "-" )
    std::cout << text;
  else
    write_file( path, text );
}

/*! \brief A manifest (`.json`) or a list of source files. */
source_set load_sources( const std::vector<std::string>& inputs )
{
  if ( inputs.size() == 1 && fs::path( inputs[0] ).extension() == ".json" )
    return load_manifest( inputs[0] );
  source_set s;
  for ( const auto& p : inputs )
    s.files.push_back( { p, read_file( p ) } );
  return s;
}

ast load_design( const std::vector<std::string>& inputs, std::string& top )
{
  auto src = load_sources( inputs );
  auto r = parse( src );
  if ( !r.ok() )
    throw user_error( r.diags.front().format(), r.diags );
  if ( top.empty() )
    top = src.top;
  if ( top.empty() )
  {
    // the last module in dependency order is not instantiated by anything before it
    auto order = dependency_order( r.design );
    if ( order.empty() )
      throw user_error( "no modules in input" );
    top = order.back();
  }
  return std::move( r.design );
}

struct flow_flags
{
  std::string config;
  std::string top;
  std::optional<uint64_t> seed;
  bool no_partselect = false, no_lms = false, no_fma = false;
  std::string policy, lms_db, library;

  void add( CLI::App* cmd, bool with_config = true )
  {
    if ( with_config )
      cmd->add_option( "--config", config, "JSON flow configuration" )->check( CLI::ExistingFile );
    cmd->add_option( "--top", top, "top module" );
    cmd->add_option( "--seed", seed, "random seed" );
    cmd->add_flag( "--no-partselect", no_partselect, "disable the part-select pass" );
    cmd->add_flag( "--no-lms", no_lms, "disable LMS rewriting" );
    cmd->add_flag( "--no-fma", no_fma, "disable multiply-add fusion" );
    cmd->add_option( "--policy", policy, "adder policy: min_area, min_delay, balanced(N)" );
    cmd->add_option( "--lms-db", lms_db, "LMS database file" )->check( CLI::ExistingFile );
    cmd->add_option( "--library", library, "cell library JSON" )->check( CLI::ExistingFile );
  }

  /* defaults < config file < flags */
  void apply( flow_config& c ) const
  {
    if ( !top.empty() )
      c.top = top;
    if ( seed )
      c.seed = *seed;
    if ( no_partselect )
      c.partselect = false;
    if ( no_lms )
      c.lms = false;
    if ( no_fma )
      c.fuse = false;
    if ( !policy.empty() )
      c.policy = arch_policy::parse( policy );
    if ( !lms_db.empty() )
      c.db_path = lms_db;
    if ( !library.empty() )
      c.library_path = library;
  }
};

flow_config load_config( const std::string& path )
{
  if ( path.empty() )
    return {};
  return flow_config::from_json( read_file( path ), fs::path( path ).parent_path().string() );
}

cell_library load_library( const std::string& path )
{
  if ( path.empty() )
    return cell_library::default_library();
  auto lib = cell_library::from_json( read_file( path ) );
  lib.validate();
  return lib;
}

std::string replace_ext( const std::string& path, const std::string& ext )
{
  fs::path p( path );
  p.replace_extension( ext );
  return p.string();
}

/* subcommands */

int cmd_pickle( const std::string& manifest, const std::string& out )
{
  emit( out, pickle( load_manifest( manifest ) ) );
  return 0;
}

int cmd_elab( const std::vector<std::string>& inputs, std::string top, const std::vector<std::string>& params,
              std::string out )
{
  auto design = load_design( inputs, top );
  param_env env;
  for ( const auto& p : params )
  {
    auto eq = p.find( '=' );
    if ( eq == std::string::npos || eq == 0 )
      throw user_error( "--param expects NAME=VALUE, got '" + p + "'" );
    env[p.substr( 0, eq )] = parse_param_value( p.substr( eq + 1 ) );
  }
  auto r = elaborate( design, top, env );
  if ( out.empty() )
    out = top + ".v";
  write_file( out, emit_verilog( r.design ) );
  write_file( replace_ext( out, ".map.json" ), r.map_json );
  return 0;
}

int cmd_synth( const std::vector<std::string>& inputs, const flow_flags& ff, const std::string& out,
               const std::string& report )
{
  auto cfg = load_config( ff.config );
  ff.apply( cfg );
  auto design = load_design( inputs, cfg.top );
  auto lib = load_library( cfg.library_path );
  auto r = run_flow( design, cfg, lib );
  for ( const auto& p : r.passes )
    std::cerr << "[" << p.pass << "] " << ( p.enabled ? "" : "(off) " ) << p.unit << " " << p.before << " -> "
              << p.after << ", changes " << p.changes << "\n";
  if ( !out.empty() )
    write_file( out, write_mapped_verilog( r.netlist, lib, r.top ) );
  emit( report, r.qor_json( cfg ) );
  return 0;
}

int cmd_lmsdb_build( uint32_t kmax, const std::vector<std::string>& harvest_files, uint64_t budget,
                     const std::string& out )
{
  std::set<truth_table> extra;
  for ( const auto& f : harvest_files )
  {
    std::string top;
    auto design = load_design( { f }, top );
    auto h = harvest_design( design, top );
    extra.insert( h.begin(), h.end() );
  }
  auto db = build_database( kmax, extra, budget );
  emit( out, db.save() );
  return 0;
}

int cmd_lmsdb_inspect( const std::string& path )
{
  auto text = read_file( path );
  auto db = lms_db::load( text );
  std::string version = text.substr( 0, text.find( '\n' ) );
  std::map<uint32_t, uint32_t> by_k;
  uint32_t exact = 0;
  for ( const auto& [key, impl] : db.entries() )
  {
    ++by_k[key.first];
    exact += impl.exact ? 1 : 0;
  }
  std::cout << "version: " << version << "\n";
  std::cout << "entries: " << db.size() << "\n";
  std::cout << "exact: " << exact << "\n";
  for ( const auto& [k, n] : by_k )
    std::cout << "k=" << k << ": " << n << "\n";
  return 0;
}

int cmd_sweep( const std::vector<std::string>& inputs, const std::vector<std::string>& config_files,
               const flow_flags& ff, uint32_t jobs, const std::string& out )
{
  std::vector<flow_config> configs;
  std::string top = ff.top;
  auto design = load_design( inputs, top );
  if ( config_files.empty() )
    configs = default_sweep_configs( top );
  else
    for ( const auto& f : config_files )
    {
      auto c = load_config( f );
      if ( c.name == "default" )
        c.name = fs::path( f ).stem().string();
      configs.push_back( c );
    }
  for ( auto& c : configs )
  {
    if ( c.top.empty() )
      c.top = top;
    ff.apply( c );
  }
  auto lib = load_library( ff.library );
  auto rows = at_sweep( design, configs, lib, nullptr, jobs );
  bool any = false;
  for ( const auto& r : rows )
  {
    if ( r.ok )
      any = true;
    else
      std::cerr << "config " << r.config << " failed: " << r.error << "\n";
  }
  emit( out, sweep_csv( rows ) );
  return any ? 0 : 1;
}

void report( const user_error& e )
{
  if ( e.diags().empty() )
    std::cerr << "error: " << e.what() << "\n";
  else
    for ( const auto& d : e.diags() )
      std::cerr << d.format() << "\n";
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "svsyn synthesis flow" };
  app.set_version_flag( "--version", "svsyn 0.1.0" );
  bool about = false;
  app.add_flag( "--about", about, "describe the tool and exit" );

  auto* pk = app.add_subcommand( "pickle", "concatenate a manifest's sources in dependency order" );
  std::string pk_manifest, pk_out;
  pk->add_option( "manifest", pk_manifest, "JSON manifest {\"top\", \"files\"}" )->required();
  pk->add_option( "--out", pk_out, "output .sv (default stdout)" );

  auto* el = app.add_subcommand( "elab", "resolve parameters and generates" );
  std::vector<std::string> el_in, el_params;
  std::string el_top, el_out;
  el->add_option( "inputs", el_in, "sources or a manifest" )->required();
  el->add_option( "--top", el_top, "top module" );
  el->add_option( "--param", el_params, "top parameter override NAME=VALUE" );
  el->add_option( "--out", el_out, "output .v; the map goes next to it as .map.json" );

  auto* sy = app.add_subcommand( "synth", "synthesize to the cell library" );
  std::vector<std::string> sy_in;
  std::string sy_out, sy_report;
  flow_flags sy_flags;
  sy->add_option( "inputs", sy_in, "sources or a manifest" )->required();
  sy->add_option( "--out", sy_out, "mapped netlist .v" );
  sy->add_option( "--report", sy_report, "QoR JSON (default stdout)" );
  sy_flags.add( sy );

  auto* db = app.add_subcommand( "lmsdb", "LMS database tools" );
  db->require_subcommand( 1 );
  auto* dbb = db->add_subcommand( "build", "build a database" );
  uint32_t db_kmax = 3;
  uint64_t db_budget = 4000000;
  std::vector<std::string> db_harvest;
  std::string db_out;
  dbb->add_option( "--kmax", db_kmax, "enumerate every class up to this many inputs" )->check( CLI::Range( 0, 4 ) );
  dbb->add_option( "--harvest", db_harvest, "designs whose cut functions are added" );
  dbb->add_option( "--budget", db_budget, "exact-search steps per class" );
  dbb->add_option( "--out", db_out, "output file (default stdout)" );
  auto* dbi = db->add_subcommand( "inspect", "print database statistics" );
  std::string dbi_path;
  dbi->add_option( "db", dbi_path, "database file" )->required();

  auto* sw = app.add_subcommand( "sweep", "area-delay sweep over configurations" );
  std::vector<std::string> sw_in, sw_configs;
  std::string sw_out;
  uint32_t sw_jobs = 1;
  flow_flags sw_flags;
  sw->add_option( "inputs", sw_in, "sources or a manifest" )->required();
  sw->add_option( "--config", sw_configs, "configuration files (default: six built-in points)" )
      ->check( CLI::ExistingFile );
  sw->add_option( "--jobs", sw_jobs, "parallel flows" )->check( CLI::Range( 1, 256 ) );
  sw->add_option( "--out", sw_out, "output CSV (default stdout)" );
  sw_flags.add( sw, false );

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::Success& e )
  {
    return app.exit( e );
  }
  catch ( const CLI::ParseError& e )
  {
    app.exit( e );
    return 1;
  }

  try
  {
    if ( about )
    {
      std::cout << about_text;
      return 0;
    }
    if ( *pk )
      return cmd_pickle( pk_manifest, pk_out );
    if ( *el )
      return cmd_elab( el_in, el_top, el_params, el_out );
    if ( *sy )
      return cmd_synth( sy_in, sy_flags, sy_out, sy_report );
    if ( *dbb )
      return cmd_lmsdb_build( db_kmax, db_harvest, db_budget, db_out );
    if ( *dbi )
      return cmd_lmsdb_inspect( dbi_path );
    if ( *sw )
      return cmd_sweep( sw_in, sw_configs, sw_flags, sw_jobs, sw_out );
    std::cerr << app.help();
    return 1;
  }
  catch ( const user_error& e )
  {
    report( e );
    return 1;
  }
  catch ( const internal_error& e )
  {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  catch ( const std::exception& e )
  {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
