#include "svsyn/frontend.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace svsyn
{

namespace
{

std::map<std::string, std::set<std::string>> instantiation_graph( const ast& design )
{
  std::map<std::string, std::set<std::string>> deps;
  for ( const auto& m : design.modules )
  {
    auto& d = deps[m.name];
    for ( const auto* inst : instances_of( m ) )
      if ( design.find( inst->module ) )
        d.insert( inst->module );
  }
  return deps;
}

std::vector<std::string> find_cycle( const std::map<std::string, std::set<std::string>>& deps )
{
  std::map<std::string, int> state; // 0 new, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::vector<std::string> cycle;
  std::function<bool( const std::string& )> dfs = [&]( const std::string& n ) {
    state[n] = 1;
    stack.push_back( n );
    for ( const auto& d : deps.at( n ) )
    {
      if ( state[d] == 1 )
      {
        auto it = std::find( stack.begin(), stack.end(), d );
        cycle.assign( it, stack.end() );
        cycle.push_back( d );
        return true;
      }
      if ( state[d] == 0 && dfs( d ) )
        return true;
    }
    stack.pop_back();
    state[n] = 2;
    return false;
  };
  for ( const auto& [n, _] : deps )
    if ( state[n] == 0 && dfs( n ) )
      return cycle;
  return {};
}

} // namespace

std::vector<std::string> dependency_order( const ast& design )
{
  auto deps = instantiation_graph( design );
  if ( auto cycle = find_cycle( deps ); !cycle.empty() )
  {
    std::string path;
    for ( size_t i = 0; i < cycle.size(); ++i )
      path += ( i ? "->" : "" ) + cycle[i];
    throw user_error( "cyclic module instantiation: " + path,
                      { diagnostic{ severity::error, "<design>", 0, 0, "cyclic module instantiation: " + path, "cycle" } } );
  }
  std::map<std::string, size_t> pending;
  std::map<std::string, std::vector<std::string>> users;
  for ( const auto& [m, ds] : deps )
  {
    pending[m] = ds.size();
    for ( const auto& d : ds )
      users[d].push_back( m );
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for ( const auto& [m, n] : pending )
    if ( n == 0 )
      ready.push( m );
  std::vector<std::string> order;
  while ( !ready.empty() )
  {
    auto m = ready.top();
    ready.pop();
    order.push_back( m );
    for ( const auto& u : users[m] )
      if ( --pending[u] == 0 )
        ready.push( u );
  }
  return order;
}

std::string pickle( const source_set& sources )
{
  auto r = parse( sources );
  if ( !r.ok() )
    throw user_error( r.diags.front().format(), r.diags );
  auto order = dependency_order( r.design );
  std::string out;
  for ( size_t i = 0; i < order.size(); ++i )
  {
    if ( i )
      out += "\n";
    out += emit_module( *r.design.find( order[i] ) );
  }
  return out;
}

source_set load_manifest( const std::string& path )
{
  std::ifstream in( path );
  if ( !in )
    throw user_error( "cannot open manifest '" + path + "'",
                      { diagnostic{ severity::error, path, 0, 0, "cannot open manifest", "io" } } );
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse( in );
  }
  catch ( const nlohmann::json::exception& e )
  {
    throw user_error( path + ": invalid manifest JSON: " + e.what() );
  }
  if ( !j.is_object() || !j.contains( "files" ) || !j["files"].is_array() )
    throw user_error( path + ": manifest needs a \"files\" array" );
  for ( const auto& [k, v] : j.items() )
    if ( k != "files" && k != "top" )
      throw user_error( path + ": unknown manifest key '" + k + "'" );
  source_set s;
  if ( j.contains( "top" ) )
    s.top = j["top"].get<std::string>();
  auto base = std::filesystem::path( path ).parent_path();
  for ( const auto& f : j["files"] )
  {
    std::filesystem::path p( f.get<std::string>() );
    if ( p.is_relative() )
      p = base / p;
    std::ifstream fin( p );
    if ( !fin )
      throw user_error( p.string() + ": cannot open source file",
                        { diagnostic{ severity::error, p.string(), 0, 0, "cannot open source file", "io" } } );
    std::stringstream ss;
    ss << fin.rdbuf();
    s.files.push_back( { f.get<std::string>(), ss.str() } );
  }
  return s;
}

} // namespace svsyn
