#include "svsyn/diagnostic.hpp"
#include "svsyn/elaborate.hpp"
#include "svsyn/flow.hpp"
#include "svsyn/partselect.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace svsyn
{

using ojson = nlohmann::ordered_json;

double report_round( double v )
{
  double r = std::round( v * 1e6 ) / 1e6;
  return r == 0 ? 0.0 : r;
}

/* config */

flow_config flow_config::from_json( const std::string& text, const std::string& base_dir )
{
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse( text );
  }
  catch ( const nlohmann::json::exception& e )
  {
    throw user_error( std::string( "config: " ) + e.what() );
  }
  if ( !j.is_object() )
    throw user_error( "config: expected a JSON object" );
  flow_config c;
  auto path = [&]( const std::string& p ) {
    if ( p.empty() || base_dir.empty() || std::filesystem::path( p ).is_absolute() )
      return p;
    return ( std::filesystem::path( base_dir ) / p ).string();
  };
  try
  {
    for ( const auto& [key, v] : j.items() )
    {
      if ( key == "name" )
        c.name = v.get<std::string>();
      else if ( key == "top" )
        c.top = v.get<std::string>();
      else if ( key == "partselect" )
        c.partselect = v.get<bool>();
      else if ( key == "lms" )
        c.lms = v.get<bool>();
      else if ( key == "mac.fuse" )
        c.fuse = v.get<bool>();
      else if ( key == "lms.objective" )
      {
        c.lms_mode = v.get<std::string>();
        if ( c.lms_mode != "area" && c.lms_mode != "depth" && c.lms_mode != "auto" )
          throw user_error( "config: lms.objective must be area, depth or auto" );
      }
      else if ( key == "map.objective" )
      {
        c.map_mode = v.get<std::string>();
        if ( c.map_mode != "area" && c.map_mode != "delay" && c.map_mode != "auto" )
          throw user_error( "config: map.objective must be area, delay or auto" );
      }
      else if ( key == "lms.db" )
        c.db_path = path( v.get<std::string>() );
      else if ( key == "library" )
        c.library_path = path( v.get<std::string>() );
      else if ( key == "seed" )
        c.seed = v.get<uint64_t>();
      else if ( key == "adder.policy" )
        c.policy = arch_policy::parse( v.get<std::string>() );
      else if ( key == "adder.default" )
      {
        auto a = parse_arch( v.get<std::string>() );
        if ( !a )
          throw user_error( "config: unknown adder architecture '" + v.get<std::string>() + "'" );
        c.default_arch = a;
      }
      else if ( key == "adder.overrides" )
      {
        if ( !v.is_object() )
          throw user_error( "config: adder.overrides must map cell names to architectures" );
        for ( const auto& [cell, a] : v.items() )
        {
          auto arch = parse_arch( a.get<std::string>() );
          if ( !arch )
            throw user_error( "config: unknown adder architecture '" + a.get<std::string>() + "' for " + cell );
          c.overrides[cell] = *arch;
        }
      }
      else
        throw user_error( "config: unknown key '" + key + "'" );
    }
  }
  catch ( const nlohmann::json::exception& e )
  {
    throw user_error( std::string( "config: " ) + e.what() );
  }
  for ( const auto& p : { c.db_path, c.library_path } )
    if ( !p.empty() && !std::filesystem::exists( p ) )
      throw user_error( "config: file not found: " + p );
  return c;
}

std::string flow_config::to_json() const
{
  ojson j;
  j["name"] = name;
  j["top"] = top;
  j["partselect"] = partselect;
  j["lms"] = lms;
  j["lms.objective"] = lms_mode;
  j["lms.db"] = db_path;
  j["mac.fuse"] = fuse;
  j["adder.policy"] = policy.text();
  if ( default_arch )
    j["adder.default"] = arch_name( *default_arch );
  ojson ov = ojson::object();
  for ( const auto& [cell, a] : overrides )
    ov[cell] = arch_name( a );
  j["adder.overrides"] = ov;
  j["map.objective"] = map_mode;
  j["library"] = library_path;
  j["seed"] = seed;
  return j.dump( 2 ) + "\n";
}

rewrite_objective flow_config::resolved_lms_objective() const
{
  if ( lms_mode == "depth" || ( lms_mode == "auto" && policy.k == arch_policy::kind::min_delay ) )
    return rewrite_objective::depth;
  return rewrite_objective::area;
}

map_objective flow_config::resolved_map_objective() const
{
  if ( map_mode == "delay" || ( map_mode == "auto" && policy.k == arch_policy::kind::min_delay ) )
    return map_objective::delay;
  return map_objective::area;
}

/* flow */

namespace
{

const lms_db& default_db()
{
  static const lms_db db = build_database( 3 );
  return db;
}

std::string read_file( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw user_error( "cannot read " + path );
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

flow_result run_flow( const ast& design, const flow_config& cfg, const cell_library& lib, const lms_db* db )
{
  flow_result r;
  if ( cfg.top.empty() )
    throw user_error( "no top module given" );
  r.top = cfg.top;
  auto el = elaborate( design, cfg.top );
  auto wn = lower_words( el.design, el.top );
  r.passes.push_back( { "lower", true, "word_cells", 0, wn.cells.size(), 0 } );

  uint64_t before = wn.cells.size();
  auto folded = const_fold( wn );
  r.passes.push_back( { "const_fold", true, "word_cells", before, wn.cells.size(), folded } );

  before = wn.cells.size();
  uint64_t ps = cfg.partselect ? partselect_pass( wn ) : 0;
  r.passes.push_back( { "partselect", cfg.partselect, "word_cells", before, wn.cells.size(), ps } );

  auto select = [&] {
    auto s = select_arch( wn, cfg.policy );
    if ( cfg.default_arch )
      s.default_arch = *cfg.default_arch;
    for ( const auto& [cell, a] : cfg.overrides )
      s.overrides[cell] = a;
    s.fuse = cfg.fuse;
    return s;
  };
  r.selection = select();
  before = wn.cells.size();
  uint64_t fused = cfg.fuse ? fuse_mac( wn, r.selection ) : 0;
  r.passes.push_back( { "fuse_mac", cfg.fuse, "word_cells", before, wn.cells.size(), fused } );
  r.selection = select();

  auto g = bitblast( wn, r.selection );
  r.passes.push_back( { "bitblast", true, "aig_ands", 0, g.num_ands(), 0 } );

  before = g.num_ands();
  uint64_t reps = 0;
  if ( cfg.lms )
  {
    lms_db loaded;
    if ( !db && !cfg.db_path.empty() )
    {
      loaded = lms_db::load( read_file( cfg.db_path ) );
      db = &loaded;
    }
    if ( !db )
      db = &default_db();
    auto st = rewrite( g, *db, cfg.resolved_lms_objective() );
    reps = st.replacements;
  }
  r.passes.push_back( { "lms", cfg.lms, "aig_ands", before, g.num_ands(), reps } );

  r.netlist = map( g, lib, cfg.resolved_map_objective() );
  r.passes.push_back( { "map", true, "cells", g.num_ands(), r.netlist.instances.size() + r.netlist.registers.size(), 0 } );
  r.optimized = std::move( g );
  r.area = area( r.netlist, lib );
  r.timing = sta( r.netlist, lib );
  r.passes.push_back( { "sta", true, "path_stages", 0, r.timing.path.size(), 0 } );
  return r;
}

std::string flow_result::qor_json( const flow_config& cfg ) const
{
  ojson j;
  j["design"] = top;
  j["config"] = ojson::parse( cfg.to_json() );
  ojson sel;
  sel["default"] = arch_name( selection.default_arch );
  ojson ov = ojson::object();
  for ( const auto& [cell, a] : selection.overrides )
    ov[cell] = arch_name( a );
  sel["overrides"] = ov;
  sel["fuse"] = selection.fuse;
  j["selection"] = sel;
  j["area_ge"] = report_round( area.total_ge );
  ojson cells = ojson::object();
  for ( const auto& [name, n] : area.cells )
    cells[name] = n;
  j["cells"] = cells;
  j["critical_path_ns"] = report_round( timing.critical_path_ns );
  j["fmax_mhz"] = timing.fmax_mhz ? ojson( report_round( *timing.fmax_mhz ) ) : ojson( nullptr );
  j["startpoint"] = timing.startpoint;
  j["endpoint"] = timing.endpoint;
  ojson path = ojson::array();
  for ( const auto& s : timing.path )
  {
    ojson e;
    e["instance"] = s.instance;
    e["cell"] = s.cell;
    e["delay_ns"] = report_round( s.delay_ns );
    e["arrival_ns"] = report_round( s.arrival_ns );
    path.push_back( e );
  }
  j["path"] = path;
  ojson slack = ojson::array();
  for ( const auto& e : timing.endpoints )
  {
    ojson s;
    s["endpoint"] = e.endpoint;
    s["arrival_ns"] = report_round( e.arrival_ns );
    s["slack_ns"] = report_round( e.slack_ns );
    slack.push_back( s );
  }
  j["slack"] = slack;
  ojson ps = ojson::array();
  for ( const auto& p : passes )
  {
    ojson e;
    e["pass"] = p.pass;
    e["enabled"] = p.enabled;
    e["unit"] = p.unit;
    e["before"] = p.before;
    e["after"] = p.after;
    e["changes"] = p.changes;
    ps.push_back( e );
  }
  j["pass_stats"] = ps;
  return j.dump( 2 ) + "\n";
}

/* sweep */

std::vector<sweep_row> at_sweep( const ast& design, const std::vector<flow_config>& configs, const cell_library& lib,
                                 const lms_db* db, uint32_t jobs )
{
  std::vector<sweep_row> rows( configs.size() );
  std::atomic<size_t> next{ 0 };
  auto worker = [&] {
    for ( size_t i; ( i = next++ ) < configs.size(); )
    {
      auto& row = rows[i];
      row.config = configs[i].name;
      try
      {
        auto r = run_flow( design, configs[i], lib, db );
        row.ok = true;
        row.area_ge = report_round( r.area.total_ge );
        row.delay_ns = report_round( r.timing.critical_path_ns );
      }
      catch ( const std::exception& e )
      {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  // the shared default database is built once before the workers start
  if ( !db )
    for ( const auto& c : configs )
      if ( c.lms && c.db_path.empty() )
      {
        db = &default_db();
        break;
      }
  jobs = std::max<uint32_t>( 1, std::min<uint32_t>( jobs, static_cast<uint32_t>( configs.size() ) ) );
  if ( jobs == 1 )
    worker();
  else
  {
    std::vector<std::thread> pool;
    for ( uint32_t t = 0; t < jobs; ++t )
      pool.emplace_back( worker );
    for ( auto& t : pool )
      t.join();
  }
  for ( auto& p : rows )
  {
    if ( !p.ok )
      continue;
    p.pareto = true;
    for ( const auto& q : rows )
      if ( q.ok && q.area_ge <= p.area_ge && q.delay_ns <= p.delay_ns && ( q.area_ge < p.area_ge || q.delay_ns < p.delay_ns ) )
      {
        p.pareto = false;
        break;
      }
  }
  return rows;
}

std::vector<flow_config> default_sweep_configs( const std::string& top )
{
  std::vector<flow_config> out;
  for ( const char* pol : { "min_area", "balanced(16)", "min_delay" } )
    for ( bool lms : { true, false } )
    {
      flow_config c;
      c.top = top;
      c.policy = arch_policy::parse( pol );
      c.lms = lms;
      c.name = std::string( pol ) + ( lms ? "+lms" : "-lms" );
      out.push_back( c );
    }
  return out;
}

std::set<truth_table> harvest_design( const ast& design, const std::string& top )
{
  auto el = elaborate( design, top );
  auto wn = lower_words( el.design, el.top );
  const_fold( wn );
  auto g = bitblast( wn, select_arch( wn, arch_policy{} ) );
  return harvest( g, 4, 8 );
}

std::string sweep_csv( const std::vector<sweep_row>& rows )
{
  std::ostringstream os;
  os << "config,area_ge,delay_ns,pareto\n";
  for ( const auto& r : rows )
  {
    if ( !r.ok )
    {
      os << r.config << ",error,error,0\n";
      continue;
    }
    ojson a = r.area_ge, d = r.delay_ns;
    os << r.config << ',' << a.dump() << ',' << d.dump() << ',' << ( r.pareto ? 1 : 0 ) << '\n';
  }
  return os.str();
}

} // namespace svsyn
