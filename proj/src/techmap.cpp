#include "svsyn/diagnostic.hpp"
#include "svsyn/lms.hpp"
#include "svsyn/techmap.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <functional>
#include <limits>
#include <sstream>

namespace svsyn
{

/* library */

const lib_cell* cell_library::find( const std::string& name ) const
{
  for ( const auto& c : cells )
    if ( c.name == name )
      return &c;
  return nullptr;
}

const lib_cell& cell_library::get( const std::string& name ) const
{
  if ( auto c = find( name ) )
    return *c;
  throw user_error( "library has no cell '" + name + "'" );
}

void cell_library::validate() const
{
  for ( const char* req : { "INV", "NAND2", "NOR2", "AND2", "OR2", "XOR2", "XNOR2", "MUX2", "DFF" } )
    if ( !find( req ) )
      throw user_error( std::string( "library is missing required cell " ) + req );
  if ( get( "NAND2" ).area_ge != 1.0 )
    throw user_error( "library: NAND2 must have area 1.0 GE" );
  for ( const auto& c : cells )
  {
    if ( c.k == 0 || c.k > 4 )
      throw user_error( "library cell " + c.name + ": input count must be 1..4" );
    if ( c.k < 6 && ( c.tt >> ( 1u << c.k ) ) != 0 )
      throw user_error( "library cell " + c.name + ": truth table wider than its inputs" );
    if ( c.area_ge < 0 )
      throw user_error( "library cell " + c.name + ": negative area" );
    if ( c.name == "DFF" )
      continue;
    if ( !c.delay_ns || *c.delay_ns <= 0 )
      throw user_error( "library cell " + c.name + ": delay must be positive" );
  }
  if ( get( "DFF" ).k != 1 )
    throw user_error( "library: DFF must have one data input" );
}

cell_library cell_library::default_library()
{
  cell_library l;
  l.cells = {
      { "INV", 1, 0x1, 0.5, 0.05 },
      { "NAND2", 2, 0x7, 1.0, 0.07 },
      { "NOR2", 2, 0x1, 1.0, 0.08 },
      { "AND2", 2, 0x8, 1.25, 0.10 },
      { "OR2", 2, 0xe, 1.25, 0.10 },
      { "XOR2", 2, 0x6, 2.25, 0.14 },
      { "XNOR2", 2, 0x9, 2.25, 0.14 },
      { "MUX2", 3, 0xca, 2.5, 0.12 }, // Y = C ? B : A
      { "DFF", 1, 0x2, 4.5, std::nullopt },
  };
  return l;
}

std::string cell_library::to_json() const
{
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for ( const auto& c : cells )
  {
    char hex[24];
    auto [end, ec] = std::to_chars( hex, hex + sizeof( hex ), c.tt, 16 );
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["k"] = c.k;
    j["tt"] = std::string( hex, end );
    j["area_ge"] = c.area_ge;
    j["delay_ns"] = c.delay_ns ? nlohmann::ordered_json( *c.delay_ns ) : nlohmann::ordered_json( nullptr );
    cs.push_back( j );
  }
  nlohmann::ordered_json root;
  root["cells"] = cs;
  return root.dump( 2 ) + "\n";
}

cell_library cell_library::from_json( const std::string& text )
{
  nlohmann::json root;
  try
  {
    root = nlohmann::json::parse( text );
  }
  catch ( const nlohmann::json::exception& e )
  {
    throw user_error( std::string( "library: " ) + e.what() );
  }
  if ( !root.is_object() || !root.contains( "cells" ) || !root["cells"].is_array() )
    throw user_error( "library: expected an object with a 'cells' array" );
  cell_library l;
  for ( const auto& j : root["cells"] )
  {
    try
    {
      for ( const auto& [key, v] : j.items() )
        if ( key != "name" && key != "k" && key != "tt" && key != "area_ge" && key != "delay_ns" )
          throw user_error( "library: unknown key '" + key + "'" );
      lib_cell c;
      c.name = j.at( "name" ).get<std::string>();
      c.k = j.at( "k" ).get<uint32_t>();
      auto tt = j.at( "tt" ).get<std::string>();
      auto [p, ec] = std::from_chars( tt.data(), tt.data() + tt.size(), c.tt, 16 );
      if ( ec != std::errc() || p != tt.data() + tt.size() )
        throw user_error( "library: bad truth table '" + tt + "' for " + c.name );
      c.area_ge = j.at( "area_ge" ).get<double>();
      if ( !j.at( "delay_ns" ).is_null() )
        c.delay_ns = j.at( "delay_ns" ).get<double>();
      l.cells.push_back( c );
    }
    catch ( const nlohmann::json::exception& e )
    {
      throw user_error( std::string( "library: " ) + e.what() );
    }
  }
  l.validate();
  return l;
}

/* mapping */

namespace
{

struct match
{
  uint32_t cell;
  std::array<uint8_t, 4> perm; // cell input i reads leaf perm[i]
  uint8_t neg;                 // cell input i reads the negated leaf
};

using match_table = std::map<std::pair<uint32_t, uint64_t>, std::vector<match>>;

match_table build_matches( const cell_library& lib, const std::vector<uint32_t>& usable )
{
  match_table t;
  for ( auto ci : usable )
  {
    const auto& c = lib.cells[ci];
    std::array<uint8_t, 4> p{ 0, 1, 2, 3 };
    do
    {
      for ( uint32_t neg = 0; neg < ( 1u << c.k ); ++neg )
      {
        uint64_t f = 0;
        for ( uint32_t x = 0; x < ( 1u << c.k ); ++x )
        {
          uint32_t z = 0;
          for ( uint32_t i = 0; i < c.k; ++i )
            if ( ( ( x >> p[i] ) ^ ( neg >> i ) ) & 1 )
              z |= 1u << i;
          if ( ( c.tt >> z ) & 1 )
            f |= uint64_t( 1 ) << x;
        }
        t[{ c.k, f }].push_back( { ci, p, static_cast<uint8_t>( neg ) } );
      }
    } while ( std::next_permutation( p.begin(), p.begin() + c.k ) );
  }
  return t;
}

enum class how
{
  none,
  source, // input or register output, positive phase
  cell,
  inv // inverter on the other phase
};

struct choice
{
  how kind = how::none;
  double flow = 0, arrival = 0;
  match m{};
  std::vector<uint32_t> leaves;
};

class mapper
{
public:
  mapper( const aig& g, const cell_library& lib, map_objective obj, bool nand_only )
      : g_( g ), lib_( lib ), obj_( obj ), nand_only_( nand_only ), inv_( index_of( "INV" ) )
  {
    std::vector<uint32_t> usable;
    for ( uint32_t i = 0; i < lib.cells.size(); ++i )
    {
      const auto& c = lib.cells[i];
      if ( c.name == "DFF" || !c.delay_ns )
        continue;
      if ( nand_only && c.name != "NAND2" )
        continue;
      usable.push_back( i );
    }
    matches_ = build_matches( lib, usable );
  }

  mapped_netlist run()
  {
    est_.assign( g_.size(), { 1.0, 1.0 } );
    auto fo = g_.fanout_counts();
    for ( uint32_t n = 0; n < g_.size(); ++n )
      est_[n] = { std::max( 1.0, double( fo[n] ) ), std::max( 1.0, double( fo[n] ) ) };
    choose( nullptr );
    auto best = cover();
    if ( nand_only_ )
      return best;
    double best_area = area( best, lib_ ).total_ge;

    // the first cover fixes the delay target; later rounds only recover area
    double target = std::numeric_limits<double>::infinity();
    if ( obj_ == map_objective::delay )
    {
      target = 0;
      for ( auto l : g_.co_lits() )
        target = std::max( target, best_[lit_node( l )][lit_compl( l )].arrival );
    }
    for ( uint32_t round = 0; round < 4; ++round )
    {
      auto info = trace( target );
      for ( uint32_t n = 0; n < g_.size(); ++n )
        for ( uint32_t ph = 0; ph < 2; ++ph )
          est_[n][ph] = std::max( 1.0, ( est_[n][ph] + 2.0 * info.uses[n][ph] ) / 3.0 );
      choose( obj_ == map_objective::delay ? &info.req : nullptr );
      auto mn = cover();
      double a = area( mn, lib_ ).total_ge;
      if ( a < best_area - 1e-9 )
      {
        best_area = a;
        best = std::move( mn );
      }
    }
    return best;
  }

private:
  const aig& g_;
  const cell_library& lib_;
  map_objective obj_;
  bool nand_only_;
  uint32_t inv_;
  match_table matches_;
  std::vector<std::array<choice, 2>> best_;
  std::vector<std::array<double, 2>> est_; // expected fanout per phase

  struct cover_info
  {
    std::vector<std::array<uint32_t, 2>> uses;
    std::vector<std::array<double, 2>> req;
  };

  uint32_t index_of( const std::string& name ) const
  {
    for ( uint32_t i = 0; i < lib_.cells.size(); ++i )
      if ( lib_.cells[i].name == name )
        return i;
    throw user_error( "library has no cell '" + name + "'" );
  }

  /* with a required time, meeting it comes first, then area */
  bool better( const choice& a, const choice& b, double req ) const
  {
    if ( b.kind == how::none )
      return a.kind != how::none;
    constexpr double eps = 1e-9;
    if ( req < std::numeric_limits<double>::infinity() )
    {
      bool fa = a.arrival <= req + eps, fb = b.arrival <= req + eps;
      if ( fa != fb )
        return fa;
      if ( fa )
      {
        if ( a.flow < b.flow - eps )
          return true;
        if ( a.flow > b.flow + eps )
          return false;
        return a.arrival < b.arrival - eps;
      }
      if ( a.arrival < b.arrival - eps )
        return true;
      if ( a.arrival > b.arrival + eps )
        return false;
      return a.flow < b.flow - eps;
    }
    return better( a, b );
  }

  bool better( const choice& a, const choice& b ) const
  {
    if ( b.kind == how::none )
      return a.kind != how::none;
    constexpr double eps = 1e-9;
    if ( obj_ == map_objective::area )
    {
      if ( a.flow < b.flow - eps )
        return true;
      if ( a.flow > b.flow + eps )
        return false;
      return a.arrival < b.arrival - eps;
    }
    if ( a.arrival < b.arrival - eps )
      return true;
    if ( a.arrival > b.arrival + eps )
      return false;
    return a.flow < b.flow - eps;
  }

  /* per node and phase: how often the current cover reads it, and its required time */
  cover_info trace( double target ) const
  {
    const double inf = std::numeric_limits<double>::infinity();
    cover_info info;
    info.uses.assign( g_.size(), { 0, 0 } );
    info.req.assign( g_.size(), { inf, inf } );
    for ( auto l : g_.co_lits() )
    {
      auto& r = info.req[lit_node( l )][lit_compl( l )];
      ++info.uses[lit_node( l )][lit_compl( l )];
      r = std::min( r, target );
    }
    const double inv_delay = *lib_.cells[inv_].delay_ns;
    for ( uint32_t n = g_.size(); n-- > 1; )
    {
      for ( uint32_t ph = 0; ph < 2; ++ph )
        if ( info.uses[n][ph] && best_[n][ph].kind == how::inv )
        {
          ++info.uses[n][ph ^ 1];
          info.req[n][ph ^ 1] = std::min( info.req[n][ph ^ 1], info.req[n][ph] - inv_delay );
        }
      for ( uint32_t ph = 0; ph < 2; ++ph )
      {
        const auto& ch = best_[n][ph];
        if ( !info.uses[n][ph] || ch.kind != how::cell )
          continue;
        const auto& cell = lib_.cells[ch.m.cell];
        for ( uint32_t i = 0; i < cell.k; ++i )
        {
          uint32_t leaf = ch.leaves[ch.m.perm[i]], lp = ( ch.m.neg >> i ) & 1;
          ++info.uses[leaf][lp];
          info.req[leaf][lp] = std::min( info.req[leaf][lp], info.req[n][ph] - *cell.delay_ns );
        }
      }
    }
    return info;
  }

  void choose( const std::vector<std::array<double, 2>>* req )
  {
    const double inf = std::numeric_limits<double>::infinity();
    best_.assign( g_.size(), {} );
    const auto& inv = lib_.cells[inv_];
    auto cuts = nand_only_ ? std::vector<std::vector<cut>>( g_.size() ) : enumerate_cuts( g_, 4, 10 );
    for ( uint32_t n = 1; n < g_.size(); ++n )
    {
      auto& b = best_[n];
      if ( g_.is_ci( n ) )
      {
        b[0] = { how::source, 0, 0, {}, {} };
        b[1] = { how::inv, inv.area_ge, *inv.delay_ns, {}, {} };
        continue;
      }
      std::array<choice, 2> direct;
      std::vector<std::vector<uint32_t>> leaf_sets;
      uint32_t a = lit_node( g_.node( n ).f0 ), c = lit_node( g_.node( n ).f1 );
      leaf_sets.push_back( a < c ? std::vector<uint32_t>{ a, c } : std::vector<uint32_t>{ c, a } );
      for ( const auto& ct : cuts[n] )
        if ( ct.leaves.size() >= 2 && ct.leaves != leaf_sets[0] )
          leaf_sets.push_back( ct.leaves );
      for ( const auto& leaves : leaf_sets )
      {
        auto tt = cut_function( g_, make_lit( n ), leaves );
        for ( uint32_t ph = 0; ph < 2; ++ph )
        {
          uint64_t f = ph ? ~tt.bits & tt.mask() : tt.bits;
          auto it = matches_.find( { tt.k, f } );
          if ( it == matches_.end() )
            continue;
          for ( const auto& m : it->second )
          {
            const auto& cell = lib_.cells[m.cell];
            choice ch{ how::cell, cell.area_ge, 0, m, leaves };
            double arr = 0;
            for ( uint32_t i = 0; i < cell.k; ++i )
            {
              uint32_t leaf = leaves[m.perm[i]];
              const auto& lc = best_[leaf][( m.neg >> i ) & 1];
              ch.flow += lc.flow / est_[leaf][( m.neg >> i ) & 1];
              arr = std::max( arr, lc.arrival );
            }
            ch.arrival = arr + *cell.delay_ns;
            if ( better( ch, direct[ph], req ? ( *req )[n][ph] : inf ) )
              direct[ph] = ch;
          }
        }
      }
      for ( uint32_t ph = 0; ph < 2; ++ph )
      {
        b[ph] = direct[ph];
        const auto& o = direct[ph ^ 1];
        if ( o.kind == how::none )
          continue;
        choice ch{ how::inv, o.flow + inv.area_ge, o.arrival + *inv.delay_ns, {}, {} };
        if ( better( ch, b[ph], req ? ( *req )[n][ph] : inf ) )
          b[ph] = ch;
      }
      // an inverter must read a phase built by a cell
      if ( b[0].kind == how::inv && b[1].kind == how::inv )
        b[1] = direct[1];
      if ( b[0].kind == how::none || b[1].kind == how::none )
        throw internal_error( "map: no match for node " + std::to_string( n ) );
    }
  }

  mapped_netlist cover()
  {
    mapped_netlist mn;
    mn.in_ports = g_.in_ports;
    mn.out_ports = g_.out_ports;
    mn.clock = g_.clock;
    std::vector<std::array<bool, 2>> needed( g_.size(), { false, false } );
    auto need = [&]( lit l ) { needed[lit_node( l )][lit_compl( l )] = true; };
    for ( auto l : g_.co_lits() )
      need( l );
    for ( uint32_t n = g_.size(); n-- > 1; )
      for ( int round = 0; round < 2; ++round )
        for ( uint32_t ph = 0; ph < 2; ++ph )
        {
          if ( !needed[n][ph] )
            continue;
          const auto& ch = best_[n][ph];
          if ( ch.kind == how::inv )
            needed[n][ph ^ 1] = true;
          else if ( ch.kind == how::cell )
            for ( uint32_t i = 0; i < lib_.cells[ch.m.cell].k; ++i )
              needed[ch.leaves[ch.m.perm[i]]][( ch.m.neg >> i ) & 1] = true;
        }

    std::vector<std::array<int64_t, 2>> net( g_.size(), { -1, -1 } );
    net[0] = { 0, 1 };
    for ( size_t i = 0; i < g_.pis().size(); ++i )
    {
      mn.input_names.push_back( g_.pi_names()[i] );
      net[g_.pis()[i]][0] = mn.num_nets++;
    }
    for ( const auto& l : g_.latches() )
    {
      net[l.node][0] = mn.num_nets++;
      mn.registers.push_back( { l.name, 0, static_cast<uint32_t>( net[l.node][0] ) } );
    }
    uint32_t counter = 0;
    auto instantiate = [&]( uint32_t n, uint32_t ph ) {
      const auto& ch = best_[n][ph];
      mapped_instance inst;
      inst.name = "u" + std::to_string( counter++ );
      if ( ch.kind == how::inv )
      {
        inst.cell = lib_.cells[inv_].name;
        inst.inputs.push_back( static_cast<uint32_t>( net[n][ph ^ 1] ) );
      }
      else
      {
        const auto& cell = lib_.cells[ch.m.cell];
        inst.cell = cell.name;
        for ( uint32_t i = 0; i < cell.k; ++i )
        {
          auto v = net[ch.leaves[ch.m.perm[i]]][( ch.m.neg >> i ) & 1];
          if ( v < 0 )
            throw internal_error( "map: leaf phase not built" );
          inst.inputs.push_back( static_cast<uint32_t>( v ) );
        }
      }
      inst.output = mn.num_nets++;
      net[n][ph] = inst.output;
      mn.instances.push_back( std::move( inst ) );
    };
    for ( uint32_t n = 1; n < g_.size(); ++n )
    {
      // direct phases before inverted ones
      for ( uint32_t ph = 0; ph < 2; ++ph )
        if ( needed[n][ph] && best_[n][ph].kind == how::cell )
          instantiate( n, ph );
      for ( uint32_t ph = 0; ph < 2; ++ph )
        if ( needed[n][ph] && best_[n][ph].kind == how::inv )
          instantiate( n, ph );
    }
    auto net_of = [&]( lit l ) {
      auto v = net[lit_node( l )][lit_compl( l )];
      if ( v < 0 )
        throw internal_error( "map: output phase not built" );
      return static_cast<uint32_t>( v );
    };
    for ( const auto& p : g_.pos() )
      mn.outputs.push_back( { p.name, net_of( p.l ) } );
    for ( size_t i = 0; i < g_.latches().size(); ++i )
      mn.registers[i].d = net_of( g_.latches()[i].next );
    return mn;
  }
};

} // namespace

mapped_netlist map_nand_inv( const aig& g, const cell_library& lib )
{
  return mapper( g, lib, map_objective::area, true ).run();
}

mapped_netlist map( const aig& g, const cell_library& lib, map_objective obj )
{
  lib.validate();
  auto by_area = mapper( g, lib, map_objective::area, false ).run();
  auto fallback = map_nand_inv( g, lib );
  if ( area( fallback, lib ).total_ge < area( by_area, lib ).total_ge )
    by_area = std::move( fallback );
  if ( obj == map_objective::area )
    return by_area;
  auto by_delay = mapper( g, lib, map_objective::delay, false ).run();
  if ( sta( by_delay, lib ).critical_path_ns > sta( by_area, lib ).critical_path_ns )
    return by_area;
  return by_delay;
}

aig to_aig( const mapped_netlist& mn, const cell_library& lib )
{
  aig g;
  g.in_ports = mn.in_ports;
  g.out_ports = mn.out_ports;
  g.clock = mn.clock;
  std::vector<lit> net( mn.num_nets, lit_false );
  net[1] = lit_true;
  for ( size_t i = 0; i < mn.input_names.size(); ++i )
    net[2 + i] = g.add_pi( mn.input_names[i] );
  for ( const auto& r : mn.registers )
    net[r.q] = g.add_latch( r.name );
  std::map<std::string, lms_impl> impls;
  for ( const auto& inst : mn.instances )
  {
    const auto& cell = lib.get( inst.cell );
    auto [it, fresh] = impls.try_emplace( cell.name );
    if ( fresh )
      it->second = heuristic_synthesis( { cell.k, cell.tt } );
    const auto& impl = it->second;
    std::vector<lit> sig( impl.k + 1 + impl.size(), lit_false );
    for ( uint32_t j = 0; j < impl.k; ++j )
      sig[j + 1] = net[inst.inputs[j]];
    auto get = [&]( uint32_t l ) { return lit_not_cond( sig[l >> 1], l & 1 ); };
    for ( uint32_t i = 0; i < impl.size(); ++i )
      sig[impl.k + 1 + i] = g.add_and( get( impl.nodes[i][0] ), get( impl.nodes[i][1] ) );
    net[inst.output] = get( impl.out );
  }
  for ( const auto& [name, n] : mn.outputs )
    g.add_po( net[n], name );
  for ( size_t i = 0; i < mn.registers.size(); ++i )
    g.set_next( static_cast<uint32_t>( i ), net[mn.registers[i].d] );
  return g;
}

/* timing and area */

timing_report sta( const mapped_netlist& mn, const cell_library& lib )
{
  timing_report rep;
  // drivers and a topological order (Kahn)
  std::vector<int32_t> driver( mn.num_nets, -1 );
  for ( size_t i = 0; i < mn.instances.size(); ++i )
  {
    if ( driver[mn.instances[i].output] >= 0 )
      throw user_error( "sta: net driven twice" );
    driver[mn.instances[i].output] = static_cast<int32_t>( i );
  }
  const size_t ni = mn.instances.size();
  std::vector<uint32_t> pending( ni, 0 );
  std::vector<std::vector<uint32_t>> users( ni );
  for ( size_t i = 0; i < ni; ++i )
    for ( auto in : mn.instances[i].inputs )
      if ( driver[in] >= 0 )
      {
        ++pending[i];
        users[driver[in]].push_back( static_cast<uint32_t>( i ) );
      }
  std::vector<uint32_t> order, ready;
  for ( size_t i = 0; i < ni; ++i )
    if ( !pending[i] )
      ready.push_back( static_cast<uint32_t>( i ) );
  while ( !ready.empty() )
  {
    uint32_t i = ready.back();
    ready.pop_back();
    order.push_back( i );
    for ( auto u : users[i] )
      if ( --pending[u] == 0 )
        ready.push_back( u );
  }
  if ( order.size() != ni )
  {
    std::string loop;
    for ( size_t i = 0; i < ni; ++i )
      if ( pending[i] )
        loop += ( loop.empty() ? "" : " -> " ) + mn.instances[i].name;
    throw user_error( "combinational loop through " + loop );
  }

  std::vector<double> arrival( mn.num_nets, 0.0 );
  for ( auto i : order )
  {
    const auto& inst = mn.instances[i];
    const auto& cell = lib.get( inst.cell );
    if ( !cell.delay_ns )
      throw user_error( "sta: cell " + cell.name + " has no delay" );
    double a = 0;
    for ( auto in : inst.inputs )
      a = std::max( a, arrival[in] );
    arrival[inst.output] = a + *cell.delay_ns;
  }

  std::vector<std::pair<std::string, uint32_t>> ends;
  for ( const auto& [name, n] : mn.outputs )
    ends.push_back( { name, n } );
  for ( const auto& r : mn.registers )
    ends.push_back( { r.name + "/D", r.d } );
  std::sort( ends.begin(), ends.end() );
  if ( ends.empty() )
    return rep;
  const std::pair<std::string, uint32_t>* crit = nullptr;
  for ( const auto& e : ends )
    if ( !crit || arrival[e.second] > arrival[crit->second] )
      crit = &e;
  rep.critical_path_ns = arrival[crit->second];
  rep.endpoint = crit->first;
  for ( const auto& e : ends )
    rep.endpoints.push_back( { e.first, arrival[e.second], rep.critical_path_ns - arrival[e.second] } );

  auto source_name = [&]( uint32_t n ) -> std::string {
    if ( driver[n] >= 0 )
      return mn.instances[driver[n]].name;
    if ( n < 2 )
      return n ? "1'b1" : "1'b0";
    if ( n - 2 < mn.input_names.size() )
      return mn.input_names[n - 2];
    for ( const auto& r : mn.registers )
      if ( r.q == n )
        return r.name + "/Q";
    return "n" + std::to_string( n );
  };
  uint32_t n = crit->second;
  while ( driver[n] >= 0 )
  {
    const auto& inst = mn.instances[driver[n]];
    rep.path.push_back( { inst.name, inst.cell, *lib.get( inst.cell ).delay_ns, arrival[n] } );
    int64_t pick = -1;
    for ( auto in : inst.inputs )
      if ( pick < 0 || arrival[in] > arrival[pick] || ( arrival[in] == arrival[pick] && source_name( in ) < source_name( static_cast<uint32_t>( pick ) ) ) )
        pick = in;
    if ( pick < 0 )
      break;
    n = static_cast<uint32_t>( pick );
  }
  rep.startpoint = source_name( n );
  std::reverse( rep.path.begin(), rep.path.end() );
  if ( rep.critical_path_ns > 0 )
    rep.fmax_mhz = 1000.0 / rep.critical_path_ns;
  return rep;
}

area_report area( const mapped_netlist& mn, const cell_library& lib )
{
  area_report r;
  for ( const auto& inst : mn.instances )
    ++r.cells[inst.cell];
  if ( !mn.registers.empty() )
    r.cells["DFF"] += static_cast<uint32_t>( mn.registers.size() );
  for ( const auto& [name, count] : r.cells )
    r.total_ge += count * lib.get( name ).area_ge;
  return r;
}

/* Verilog */

namespace
{

const char* pin_name( uint32_t i )
{
  static const char* names[] = { "A", "B", "C", "D" };
  return names[i];
}

std::string cell_expression( const lib_cell& c )
{
  std::string sop;
  for ( uint32_t m = 0; m < ( 1u << c.k ); ++m )
  {
    if ( !( ( c.tt >> m ) & 1 ) )
      continue;
    std::string term;
    for ( uint32_t i = 0; i < c.k; ++i )
      term += std::string( term.empty() ? "" : " & " ) + ( ( m >> i ) & 1 ? "" : "~" ) + pin_name( i );
    sop += ( sop.empty() ? "(" : " | (" ) + term + ")";
  }
  return sop.empty() ? "1'b0" : sop;
}

} // namespace

std::string write_mapped_verilog( const mapped_netlist& mn, const cell_library& lib, const std::string& module_name )
{
  std::ostringstream os;
  std::map<std::string, bool> used;
  for ( const auto& inst : mn.instances )
    used[inst.cell] = true;
  for ( const auto& [name, _] : used )
  {
    const auto& c = lib.get( name );
    os << "module " << c.name << "(";
    for ( uint32_t i = 0; i < c.k; ++i )
      os << "input logic " << pin_name( i ) << ", ";
    os << "output logic Y);\n  assign Y = " << cell_expression( c ) << ";\nendmodule\n\n";
  }
  if ( !mn.registers.empty() )
    os << "module DFF(input logic CLK, input logic D, output logic Q);\n  always_ff @(posedge CLK) Q <= D;\nendmodule\n\n";

  os << "module " << module_name << "(";
  bool first = true;
  auto port = [&]( const std::string& dir, const port_info& p ) {
    os << ( first ? "" : ", " ) << dir << " logic ";
    if ( p.width > 1 )
      os << "[" << p.width - 1 << ":0] ";
    os << p.name;
    first = false;
  };
  if ( !mn.clock.empty() )
    port( "input", { mn.clock, 1 } );
  for ( const auto& p : mn.in_ports )
    port( "input", p );
  for ( const auto& p : mn.out_ports )
    port( "output", p );
  os << ");\n";
  auto nn = [&]( uint32_t n ) -> std::string {
    if ( n < 2 )
      return n ? "1'b1" : "1'b0";
    return "n" + std::to_string( n );
  };
  for ( uint32_t n = 2; n < mn.num_nets; ++n )
    os << "  logic " << nn( n ) << ";\n";
  for ( size_t i = 0; i < mn.input_names.size(); ++i )
    os << "  assign " << nn( static_cast<uint32_t>( 2 + i ) ) << " = " << mn.input_names[i] << ";\n";
  for ( const auto& r : mn.registers )
  {
    std::string inst = r.name;
    std::replace( inst.begin(), inst.end(), '[', '_' );
    std::replace( inst.begin(), inst.end(), ']', '_' );
    std::replace( inst.begin(), inst.end(), '.', '_' );
    std::replace( inst.begin(), inst.end(), '$', '_' );
    os << "  DFF r_" << inst << " (.CLK(" << mn.clock << "), .D(" << nn( r.d ) << "), .Q(" << nn( r.q ) << "));\n";
  }
  for ( const auto& inst : mn.instances )
  {
    os << "  " << inst.cell << " " << inst.name << " (";
    for ( size_t i = 0; i < inst.inputs.size(); ++i )
      os << "." << pin_name( static_cast<uint32_t>( i ) ) << "(" << nn( inst.inputs[i] ) << "), ";
    os << ".Y(" << nn( inst.output ) << "));\n";
  }
  for ( const auto& [name, n] : mn.outputs )
    os << "  assign " << name << " = " << nn( n ) << ";\n";
  os << "endmodule\n";
  return os.str();
}

} // namespace svsyn
