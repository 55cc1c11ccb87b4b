#include "svsyn/eval.hpp"
#include "svsyn/word_netlist.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace svsyn
{

namespace
{

constexpr uint32_t k_const = UINT32_MAX;     // constant bit; `bit` holds the value
constexpr uint32_t k_hole = UINT32_MAX - 1;  // not assigned yet in a procedural block
constexpr uint32_t k_latch = UINT32_MAX - 2; // assigned on some paths only
constexpr uint32_t k_unres = UINT32_MAX - 3; // driver not lowered yet

struct sbit
{
  uint32_t net = k_unres;
  uint32_t bit = 0;
  bool operator==( const sbit& ) const = default;
  auto operator<=>( const sbit& ) const = default;
  bool is_real() const { return net < k_unres || net == k_const; }
};

using sbits = std::vector<sbit>;

struct signal
{
  std::string name;
  vtype type;
  decl_range range;
  sbits bits;
  std::vector<int32_t> driver; // process per bit; -1 undriven, -2 top input
};

struct inst_scope;

class scope_resolver : public name_resolver
{
public:
  scope_resolver( const inst_scope& sc, const std::vector<signal>& sigs ) : sc_( sc ), sigs_( sigs ) {}
  std::optional<vtype> type_of( const std::string& name ) const override;
  std::optional<bitvec> value_of( const std::string& name ) const override;
  decl_range range_of( const std::string& name ) const override;

private:
  const inst_scope& sc_;
  const std::vector<signal>& sigs_;
};

struct constant
{
  vtype type;
  bitvec value;
};

struct inst_scope
{
  std::string prefix;
  const module_decl* m = nullptr;
  std::map<std::string, uint32_t> signals;
  std::map<std::string, constant> consts;
};

std::optional<vtype> scope_resolver::type_of( const std::string& name ) const
{
  if ( auto it = sc_.consts.find( name ); it != sc_.consts.end() )
    return it->second.type;
  if ( auto it = sc_.signals.find( name ); it != sc_.signals.end() )
    return sigs_[it->second].type;
  return std::nullopt;
}

std::optional<bitvec> scope_resolver::value_of( const std::string& name ) const
{
  if ( auto it = sc_.consts.find( name ); it != sc_.consts.end() )
    return it->second.value;
  return std::nullopt;
}

decl_range scope_resolver::range_of( const std::string& name ) const
{
  if ( auto it = sc_.signals.find( name ); it != sc_.signals.end() )
    return sigs_[it->second].range;
  return name_resolver::range_of( name );
}

struct process
{
  enum class kind
  {
    assign,
    comb,
    ff
  } k = kind::assign;
  inst_scope* lhs_scope = nullptr;
  const expr* lhs = nullptr;
  inst_scope* rhs_scope = nullptr;
  const expr* rhs = nullptr;
  const always_block* ab = nullptr;
  int state = 0; // 0 pending, 1 running, 2 done
  std::map<uint32_t, std::vector<bool>> targets; // signal -> bit mask
  std::map<uint32_t, uint32_t> dff;              // signal -> dff cell index
};

/* symbolic state of a procedural block */
struct exec_state
{
  std::map<uint32_t, sbits> vals;
};

class lowerer
{
public:
  lowerer( const ast& design ) : design_( design ) {}

  word_netlist run( const std::string& top )
  {
    const module_decl* m = design_.find( top );
    if ( !m )
      throw user_error( "top module '" + top + "' not found" );
    auto& sc = scopes_.emplace_back();
    sc.m = m;
    declare( sc, 0 );

    // top ports
    for ( const auto& p : m->ports )
    {
      uint32_t id = sc.signals.at( p.name );
      auto& s = sigs_[id];
      if ( p.dir == port_dir::input )
      {
        uint32_t n = wn_.add_input( p.name, s.type.width );
        for ( uint32_t b = 0; b < s.type.width; ++b )
        {
          if ( s.driver[b] != -1 )
            throw user_error( p.loc, "input '" + p.name + "' is driven inside the design", "lower" );
          s.driver[b] = -2;
          s.bits[b] = { n, b };
        }
      }
    }

    resolve_clock();
    for ( size_t p = 0; p < procs_.size(); ++p )
      run_process( static_cast<uint32_t>( p ), "" );

    for ( const auto& p : m->ports )
      if ( p.dir == port_dir::output )
      {
        auto& s = sigs_[sc.signals.at( p.name )];
        sbits b;
        for ( uint32_t i = 0; i < s.type.width; ++i )
          b.push_back( read_bit( sc.signals.at( p.name ), i, p.name ) );
        wn_.add_output( p.name, net_of( b ) );
      }

    if ( !wn_.clock.empty() )
    {
      uint32_t clk_net = clock_net_;
      for ( const auto& c : wn_.cells )
        for ( auto n : c.in )
          if ( n == clk_net )
            throw user_error( "clock '" + wn_.clock + "' is used as data" );
      for ( const auto& o : wn_.outputs )
        if ( o.net == clk_net )
          throw user_error( "clock '" + wn_.clock + "' is used as data" );
      wn_.inputs.erase( std::remove_if( wn_.inputs.begin(), wn_.inputs.end(),
                                        [&]( const wport& p ) { return p.net == clk_net; } ),
                        wn_.inputs.end() );
    }
    wn_.topo_order(); // reports combinational cycles across instance boundaries
    wn_.validate();
    return std::move( wn_ );
  }

private:
  const ast& design_;
  word_netlist wn_;
  std::deque<inst_scope> scopes_;
  std::vector<signal> sigs_;
  std::vector<process> procs_;
  std::deque<expr> owned_;
  std::map<sbits, uint32_t> net_cache_;
  std::vector<std::pair<uint32_t, std::string>> running_; // process, name that was read
  exec_state* cur_ = nullptr;      // procedural state while executing a block
  const process* cur_proc_ = nullptr;
  uint32_t clock_net_ = UINT32_MAX;

  /* declarations */

  vtype resolve_type( const data_type& t, const inst_scope& sc, decl_range& rg, const source_loc& loc, uint32_t fallback_width )
  {
    scope_resolver r( sc, sigs_ );
    vtype v;
    v.is_signed = t.is_signed;
    if ( t.keyword == type_keyword::named )
      throw user_error( loc, "unresolved type '" + t.type_name + "'", "lower" );
    if ( t.keyword == type_keyword::int_ || t.keyword == type_keyword::integer )
    {
      v.is_signed = true;
      rg = { 31, 0 };
      v.width = 32;
      return v;
    }
    if ( t.packed )
    {
      rg = { eval_int( t.packed->msb, r ), eval_int( t.packed->lsb, r ) };
      v.width = rg.width();
      if ( v.width > max_width )
        throw user_error( loc, "declaration too wide", "lower" );
    }
    else
    {
      v.width = fallback_width;
      rg = { static_cast<int64_t>( fallback_width ) - 1, 0 };
    }
    return v;
  }

  uint32_t new_signal( inst_scope& sc, const std::string& name, vtype t, decl_range rg, const source_loc& loc )
  {
    if ( sc.signals.count( name ) || sc.consts.count( name ) )
      throw user_error( loc, "duplicate declaration of '" + name + "'", "lower" );
    signal s;
    s.name = sc.prefix + name;
    s.type = t;
    s.range = rg;
    s.bits.assign( t.width, sbit{} );
    s.driver.assign( t.width, -1 );
    sigs_.push_back( std::move( s ) );
    uint32_t id = static_cast<uint32_t>( sigs_.size() - 1 );
    sc.signals[name] = id;
    return id;
  }

  void define_const( inst_scope& sc, const param_decl& p )
  {
    if ( !p.value )
      throw user_error( p.loc, "parameter '" + p.name + "' has no value", "lower" );
    scope_resolver r( sc, sigs_ );
    auto self = self_type( *p.value, r );
    decl_range rg;
    vtype t = resolve_type( p.type, sc, rg, p.loc, self.width );
    if ( !p.type.packed && p.type.keyword == type_keyword::none )
      t.is_signed = t.is_signed || self.is_signed;
    sc.consts[p.name] = { t, eval_assign( *p.value, r, t.width ) };
  }

  void declare( inst_scope& sc, uint32_t depth )
  {
    if ( depth > 64 )
      throw user_error( "instance nesting too deep at '" + sc.prefix + "'" );
    const auto& m = *sc.m;
    for ( const auto& p : m.params )
      define_const( sc, p );
    for ( const auto& it : m.items )
      if ( auto p = std::get_if<param_decl>( &it.node ) )
        define_const( sc, *p );
    for ( const auto& p : m.ports )
    {
      if ( p.dir == port_dir::inout )
        throw user_error( p.loc, "unsupported construct: inout port", "lower" );
      decl_range rg;
      auto t = resolve_type( p.type, sc, rg, p.loc, 1 );
      new_signal( sc, p.name, t, rg, p.loc );
    }
    for ( const auto& it : m.items )
      if ( auto n = std::get_if<net_decl>( &it.node ) )
      {
        decl_range rg;
        auto t = resolve_type( n->type, sc, rg, n->loc, 1 );
        new_signal( sc, n->name, t, rg, n->loc );
      }
    for ( const auto& it : m.items )
    {
      if ( auto n = std::get_if<net_decl>( &it.node ) )
      {
        if ( n->init )
          add_assign( &sc, &owned_.emplace_back( expr::ident( n->name, n->loc ) ), &sc, &*n->init );
      }
      else if ( auto a = std::get_if<continuous_assign>( &it.node ) )
        add_assign( &sc, &a->lhs, &sc, &a->rhs );
      else if ( auto ab = std::get_if<always_block>( &it.node ) )
        add_always( sc, *ab );
      else if ( auto in = std::get_if<instance>( &it.node ) )
        add_instance( sc, *in, depth );
      else if ( std::holds_alternative<gen_for>( it.node ) || std::holds_alternative<gen_if>( it.node ) ||
                std::holds_alternative<typedef_decl>( it.node ) )
        throw user_error( "module '" + m.name + "' is not elaborated" );
    }
  }

  void add_instance( inst_scope& parent, const instance& in, uint32_t depth )
  {
    const module_decl* cm = design_.find( in.module );
    if ( !cm )
      throw user_error( in.loc, "unknown module '" + in.module + "'", "lower" );
    if ( !in.params.empty() )
      throw user_error( in.loc, "instance '" + in.name + "' has parameter overrides; elaborate first", "lower" );
    auto& child = scopes_.emplace_back();
    child.prefix = parent.prefix + in.name + ".";
    child.m = cm;
    declare( child, depth + 1 );
    for ( size_t i = 0; i < in.ports.size(); ++i )
    {
      const auto& b = in.ports[i];
      if ( !b.value )
        continue;
      const port_decl* pd = nullptr;
      if ( b.name.empty() )
      {
        if ( i >= cm->ports.size() )
          throw user_error( in.loc, "too many port connections for '" + in.name + "'", "lower" );
        pd = &cm->ports[i];
      }
      else
        for ( const auto& p : cm->ports )
          if ( p.name == b.name )
            pd = &p;
      if ( !pd )
        throw user_error( in.loc, "module '" + in.module + "' has no port '" + b.name + "'", "lower" );
      const expr* port_ref = &owned_.emplace_back( expr::ident( pd->name, in.loc ) );
      if ( pd->dir == port_dir::input )
        add_assign( &child, port_ref, &parent, &*b.value );
      else
        add_assign( &parent, &*b.value, &child, port_ref );
    }
  }

  void add_assign( inst_scope* lsc, const expr* lhs, inst_scope* rsc, const expr* rhs )
  {
    process p;
    p.k = process::kind::assign;
    p.lhs_scope = lsc;
    p.lhs = lhs;
    p.rhs_scope = rsc;
    p.rhs = rhs;
    collect_targets( *lhs, *lsc, p.targets, false );
    register_process( std::move( p ) );
  }

  void add_always( inst_scope& sc, const always_block& ab )
  {
    process p;
    p.k = ( ab.kind == always_kind::comb || ab.kind == always_kind::star ) ? process::kind::comb : process::kind::ff;
    p.lhs_scope = &sc;
    p.ab = &ab;
    collect_stmt_targets( ab.body, sc, p.targets );
    register_process( std::move( p ) );
  }

  void register_process( process p )
  {
    uint32_t id = static_cast<uint32_t>( procs_.size() );
    for ( const auto& [sid, mask] : p.targets )
    {
      auto& s = sigs_[sid];
      for ( uint32_t b = 0; b < mask.size(); ++b )
        if ( mask[b] )
        {
          if ( s.driver[b] != -1 )
            throw user_error( "multiple drivers for '" + s.name + "[" + std::to_string( b ) + "]'" );
          s.driver[b] = static_cast<int32_t>( id );
        }
      if ( p.k == process::kind::ff )
      {
        uint32_t w = s.type.width;
        uint32_t q = wn_.add_cell( wkind::dff, { wn_.add_const( bitvec( w ) ) }, w );
        p.dff[sid] = static_cast<uint32_t>( wn_.cells.size() - 1 );
        for ( uint32_t b = 0; b < w; ++b )
          if ( mask[b] )
            s.bits[b] = { q, b };
      }
    }
    procs_.push_back( std::move( p ) );
  }

  /* static target analysis */

  void collect_targets( const expr& e, const inst_scope& sc, std::map<uint32_t, std::vector<bool>>& out, bool procedural )
  {
    if ( e.kind == expr_kind::concat )
    {
      for ( const auto& o : e.operands )
        collect_targets( o, sc, out, procedural );
      return;
    }
    auto it = sc.signals.find( e.name );
    if ( it == sc.signals.end() ||
         ( e.kind != expr_kind::ident && e.kind != expr_kind::index && e.kind != expr_kind::range_select &&
           e.kind != expr_kind::indexed_select ) )
      throw user_error( e.loc, "invalid assignment target", "lower" );
    const auto& s = sigs_[it->second];
    auto& mask = out[it->second];
    mask.resize( s.type.width, false );
    auto span = const_span( e, sc );
    if ( !span )
    {
      if ( !procedural )
        throw user_error( e.loc, "unsupported construct: variable-index target in continuous assignment", "lower" );
      std::fill( mask.begin(), mask.end(), true );
      return;
    }
    for ( int64_t b = span->low; b < span->low + span->width; ++b )
      if ( b >= 0 && b < s.type.width )
        mask[b] = true;
  }

  void collect_stmt_targets( const stmt& s, const inst_scope& sc, std::map<uint32_t, std::vector<bool>>& out )
  {
    switch ( s.kind )
    {
    case stmt_kind::blocking:
    case stmt_kind::nonblocking:
      collect_targets( s.lhs, sc, out, true );
      break;
    case stmt_kind::block:
    case stmt_kind::if_:
      for ( const auto& c : s.body )
        collect_stmt_targets( c, sc, out );
      break;
    case stmt_kind::case_:
      for ( const auto& ci : s.items )
        for ( const auto& c : ci.body )
          collect_stmt_targets( c, sc, out );
      break;
    case stmt_kind::null:
      break;
    }
  }

  /* span of a select with constant position; nullopt when the position depends on signals */
  std::optional<select_span> const_span( const expr& e, const inst_scope& sc )
  {
    scope_resolver r( sc, sigs_ );
    const auto& s = sigs_[sc.signals.at( e.name )];
    switch ( e.kind )
    {
    case expr_kind::ident:
      return select_span{ 0, s.type.width };
    case expr_kind::index:
      if ( !is_const( e.operands[0], sc ) )
        return std::nullopt;
      return select_span{ s.range.position( eval_int( e.operands[0], r ) ), 1 };
    case expr_kind::range_select:
      return range_span( s.range, eval_int( e.operands[0], r ), eval_int( e.operands[1], r ) );
    case expr_kind::indexed_select:
    {
      int64_t w = eval_int( e.operands[1], r );
      if ( w <= 0 || w > max_width )
        throw user_error( e.loc, "bad part-select width", "lower" );
      if ( !is_const( e.operands[0], sc ) )
        return std::nullopt;
      return indexed_span( s.range, eval_int( e.operands[0], r ), static_cast<uint32_t>( w ), e.op == "+:" );
    }
    default:
      return std::nullopt;
    }
  }

  bool is_const( const expr& e, const inst_scope& sc ) const
  {
    switch ( e.kind )
    {
    case expr_kind::number:
    case expr_kind::fill:
      return true;
    case expr_kind::ident:
      return sc.consts.count( e.name ) > 0;
    case expr_kind::index:
    case expr_kind::range_select:
    case expr_kind::indexed_select:
      if ( !sc.consts.count( e.name ) )
        return false;
      break;
    default:
      break;
    }
    return std::all_of( e.operands.begin(), e.operands.end(), [&]( const expr& o ) { return is_const( o, sc ); } );
  }

  /* clocks */

  void resolve_clock()
  {
    bool have = false;
    for ( auto& p : procs_ )
    {
      if ( p.k != process::kind::ff )
        continue;
      auto it = p.lhs_scope->signals.find( p.ab->clock );
      if ( it == p.lhs_scope->signals.end() )
        throw user_error( p.ab->loc, "unknown clock '" + p.ab->clock + "'", "lower" );
      if ( sigs_[it->second].type.width != 1 )
        throw user_error( p.ab->loc, "clock '" + p.ab->clock + "' must be one bit wide", "lower" );
      sbit b = read_bit( it->second, 0, sigs_[it->second].name );
      std::string root;
      for ( const auto& in : wn_.inputs )
        if ( b.net == in.net )
          root = in.name;
      if ( root.empty() )
        throw user_error( p.ab->loc, "clock '" + sigs_[it->second].name + "' is not driven by a top-level input", "lower" );
      if ( have && ( root != wn_.clock || p.ab->posedge == wn_.negedge ) )
        throw user_error( p.ab->loc, "more than one clock or clock edge in the design", "lower" );
      have = true;
      wn_.clock = root;
      wn_.negedge = !p.ab->posedge;
      clock_net_ = b.net;
    }
  }

  /* demand-driven resolution */

  sbit read_bit( uint32_t sid, uint32_t b, const std::string& why )
  {
    {
      const auto& s = sigs_[sid];
      if ( s.bits[b].net != k_unres )
        return s.bits[b];
      if ( s.driver[b] == -1 )
        return { k_const, 0 };
    }
    run_process( static_cast<uint32_t>( sigs_[sid].driver[b] ), why );
    const auto& s = sigs_[sid];
    if ( s.bits[b].net == k_unres )
      throw internal_error( "bit " + std::to_string( b ) + " of '" + s.name + "' left unresolved" );
    return s.bits[b];
  }

  void run_process( uint32_t id, const std::string& why )
  {
    auto& p = procs_[id];
    if ( p.state == 2 )
      return;
    if ( p.state == 1 )
    {
      std::string path;
      bool on = false;
      for ( const auto& [pid, name] : running_ )
      {
        if ( pid == id )
          on = true;
        if ( on && !name.empty() )
          path += name + " -> ";
      }
      throw user_error( "combinational cycle: " + path + why );
    }
    p.state = 1;
    running_.push_back( { id, why } );
    auto* saved_cur = cur_;
    auto* saved_proc = cur_proc_;
    cur_ = nullptr;
    cur_proc_ = &p;
    if ( p.k == process::kind::assign )
      run_assign( p );
    else
      run_block( p );
    cur_ = saved_cur;
    cur_proc_ = saved_proc;
    running_.pop_back();
    procs_[id].state = 2;
  }

  void run_assign( process& p )
  {
    std::vector<std::pair<uint32_t, select_span>> tg;
    lvalue_spans( *p.lhs, *p.lhs_scope, tg );
    uint32_t width = 0;
    for ( const auto& t : tg )
      width += t.second.width;
    uint32_t v = lower_assign( *p.rhs, *p.rhs_scope, width );
    uint32_t off = 0;
    for ( auto it = tg.rbegin(); it != tg.rend(); ++it )
    {
      auto& s = sigs_[it->first];
      for ( uint32_t k = 0; k < it->second.width; ++k )
      {
        int64_t b = it->second.low + k;
        if ( b >= 0 && b < s.type.width )
          s.bits[b] = { v, off + k };
      }
      off += it->second.width;
    }
  }

  void lvalue_spans( const expr& e, const inst_scope& sc, std::vector<std::pair<uint32_t, select_span>>& out )
  {
    if ( e.kind == expr_kind::concat )
    {
      for ( const auto& o : e.operands )
        lvalue_spans( o, sc, out );
      return;
    }
    out.push_back( { sc.signals.at( e.name ), *const_span( e, sc ) } );
  }

  void run_block( process& p )
  {
    exec_state st;
    bool ff = p.k == process::kind::ff;
    for ( const auto& [sid, mask] : p.targets )
    {
      auto& v = st.vals[sid];
      if ( ff )
        for ( uint32_t b = 0; b < mask.size(); ++b )
          v.push_back( { wn_.cells[p.dff.at( sid )].out, b } );
      else
        v.assign( mask.size(), sbit{ k_hole, 0 } );
    }
    cur_ = &st;
    exec( p.ab->body, *p.lhs_scope, st, ff );
    cur_ = nullptr;
    for ( const auto& [sid, mask] : p.targets )
    {
      auto& s = sigs_[sid];
      const auto& v = st.vals.at( sid );
      if ( ff )
      {
        sbits d;
        for ( uint32_t b = 0; b < mask.size(); ++b )
          d.push_back( mask[b] ? v[b] : sbit{ k_const, 0 } );
        uint32_t dn = net_of( d );
        wn_.cells[p.dff.at( sid )].in[0] = dn;
        continue;
      }
      for ( uint32_t b = 0; b < mask.size(); ++b )
        if ( mask[b] )
        {
          if ( !v[b].is_real() )
            throw user_error( p.ab->loc, "latch inferred: '" + s.name + "' is not assigned on every path", "lower" );
          s.bits[b] = v[b];
        }
    }
  }

  /* procedural execution */

  void exec( const stmt& s, const inst_scope& sc, exec_state& st, bool ff )
  {
    switch ( s.kind )
    {
    case stmt_kind::null:
      break;
    case stmt_kind::block:
      for ( const auto& c : s.body )
        exec( c, sc, st, ff );
      break;
    case stmt_kind::blocking:
      if ( ff )
        throw user_error( s.loc, "blocking assignment in clocked block", "lower" );
      proc_assign( s.lhs, s.rhs, sc, st );
      break;
    case stmt_kind::nonblocking:
      if ( !ff )
        throw user_error( s.loc, "nonblocking assignment in combinational block", "lower" );
      proc_assign( s.lhs, s.rhs, sc, st );
      break;
    case stmt_kind::if_:
    {
      const stmt* other = s.body.size() > 1 ? &s.body[1] : nullptr;
      branch( lower_bool( s.cond, sc ), &s.body[0], other, sc, st, ff );
      break;
    }
    case stmt_kind::case_:
      exec_case( s, sc, st, ff );
      break;
    }
  }

  void exec_opt( const stmt* s, const inst_scope& sc, exec_state& st, bool ff )
  {
    if ( s )
      exec( *s, sc, st, ff );
  }

  template<class Then, class Else>
  void branch_fn( uint32_t cond, Then&& then_fn, Else&& else_fn, exec_state& st )
  {
    if ( auto c = const_value( cond ) )
    {
      if ( c->bit( 0 ) )
        then_fn( st );
      else
        else_fn( st );
      return;
    }
    exec_state other = st;
    then_fn( st );
    else_fn( other );
    merge( cond, st, other );
  }

  void branch( uint32_t cond, const stmt* t, const stmt* e, const inst_scope& sc, exec_state& st, bool ff )
  {
    branch_fn(
        cond, [&]( exec_state& x ) { exec_opt( t, sc, x, ff ); }, [&]( exec_state& x ) { exec_opt( e, sc, x, ff ); }, st );
  }

  /* st := cond ? st : other */
  void merge( uint32_t cond, exec_state& st, const exec_state& other )
  {
    for ( auto& [sid, v] : st.vals )
    {
      const auto& o = other.vals.at( sid );
      sbits a, b;
      std::vector<uint32_t> pos;
      for ( uint32_t i = 0; i < v.size(); ++i )
      {
        if ( v[i] == o[i] )
          continue;
        if ( !v[i].is_real() || !o[i].is_real() )
        {
          v[i] = { k_latch, 0 };
          continue;
        }
        a.push_back( v[i] );
        b.push_back( o[i] );
        pos.push_back( i );
      }
      if ( pos.empty() )
        continue;
      uint32_t m = wn_.add_cell( wkind::mux, { cond, net_of( a ), net_of( b ) }, static_cast<uint32_t>( pos.size() ) );
      for ( uint32_t k = 0; k < pos.size(); ++k )
        v[pos[k]] = { m, k };
    }
  }

  void exec_case( const stmt& s, const inst_scope& sc, exec_state& st, bool ff )
  {
    scope_resolver r( sc, sigs_ );
    auto t = self_type( s.cond, r );
    uint32_t w = t.width;
    bool sgn = t.is_signed;
    const case_item* dflt = nullptr;
    for ( const auto& ci : s.items )
    {
      if ( ci.labels.empty() )
        dflt = &ci;
      for ( const auto& l : ci.labels )
      {
        auto lt = self_type( l, r );
        w = std::max( w, lt.width );
        sgn = sgn && lt.is_signed;
      }
    }
    uint32_t subject = lower( s.cond, sc, w, sgn );
    std::vector<const case_item*> items;
    for ( const auto& ci : s.items )
      if ( !ci.labels.empty() )
        items.push_back( &ci );
    case_chain( items, 0, dflt, subject, w, sgn, sc, st, ff );
  }

  void case_chain( const std::vector<const case_item*>& items, size_t i, const case_item* dflt, uint32_t subject, uint32_t w,
                   bool sgn, const inst_scope& sc, exec_state& st, bool ff )
  {
    if ( i == items.size() )
    {
      if ( dflt )
        exec( dflt->body[0], sc, st, ff );
      return;
    }
    uint32_t hit = UINT32_MAX;
    for ( const auto& l : items[i]->labels )
    {
      uint32_t e = wn_.add_cell( wkind::eq, { subject, lower( l, sc, w, sgn ) }, 1 );
      hit = hit == UINT32_MAX ? e : wn_.add_cell( wkind::or_, { hit, e }, 1 );
    }
    branch_fn(
        hit, [&]( exec_state& x ) { exec( items[i]->body[0], sc, x, ff ); },
        [&]( exec_state& x ) { case_chain( items, i + 1, dflt, subject, w, sgn, sc, x, ff ); }, st );
  }

  void proc_assign( const expr& lhs, const expr& rhs, const inst_scope& sc, exec_state& st )
  {
    // targets, MSB first
    struct tgt
    {
      uint32_t sid;
      std::optional<select_span> span;
      const expr* e;
      uint32_t width;
    };
    std::vector<tgt> tg;
    auto collect = [&]( auto&& self, const expr& e ) -> void {
      if ( e.kind == expr_kind::concat )
      {
        for ( const auto& o : e.operands )
          self( self, o );
        return;
      }
      uint32_t sid = sc.signals.at( e.name );
      auto sp = const_span( e, sc );
      uint32_t w = sp ? sp->width : ( e.kind == expr_kind::index ? 1 : static_cast<uint32_t>( eval_int( e.operands[1], scope_resolver( sc, sigs_ ) ) ) );
      tg.push_back( { sid, sp, &e, w } );
    };
    collect( collect, lhs );
    uint32_t width = 0;
    for ( const auto& t : tg )
      width += t.width;
    uint32_t v = lower_assign( rhs, sc, width );
    uint32_t off = 0;
    for ( auto it = tg.rbegin(); it != tg.rend(); ++it )
    {
      auto& cur = st.vals.at( it->sid );
      uint32_t sw = static_cast<uint32_t>( cur.size() );
      if ( it->span )
      {
        for ( uint32_t k = 0; k < it->width; ++k )
        {
          int64_t b = it->span->low + k;
          if ( b >= 0 && b < sw )
            cur[b] = { v, off + k };
        }
      }
      else
      {
        // one-hot decode of the start position
        auto [shamt, is_signed] = select_shift( *it->e, sc, it->width );
        uint32_t aw = wn_.width( shamt );
        for ( int64_t p = 1 - static_cast<int64_t>( it->width ); p < static_cast<int64_t>( sw ); ++p )
        {
          if ( p < 0 && !is_signed )
            continue;
          if ( !is_signed && aw < 63 && p >= ( int64_t( 1 ) << aw ) )
            break;
          uint32_t hit = wn_.add_cell( wkind::eq, { shamt, wn_.add_const( bitvec( aw, static_cast<uint64_t>( p ) ) ) }, 1 );
          sbits a, b;
          std::vector<uint32_t> pos;
          for ( uint32_t k = 0; k < it->width; ++k )
          {
            int64_t bit = p + k;
            if ( bit < 0 || bit >= sw )
              continue;
            a.push_back( { v, off + k } );
            b.push_back( cur[bit] );
            pos.push_back( static_cast<uint32_t>( bit ) );
          }
          bool real = std::all_of( b.begin(), b.end(), []( const sbit& x ) { return x.is_real(); } );
          if ( !real )
          {
            for ( auto q : pos )
              cur[q] = { k_latch, 0 };
            continue;
          }
          uint32_t m = wn_.add_cell( wkind::mux, { hit, net_of( a ), net_of( b ) }, static_cast<uint32_t>( pos.size() ) );
          for ( uint32_t k = 0; k < pos.size(); ++k )
            cur[pos[k]] = { m, k };
        }
      }
      off += it->width;
    }
  }

  /* nets */

  std::optional<bitvec> const_value( uint32_t net ) const
  {
    for ( auto it = wn_.cells.rbegin(); it != wn_.cells.rend(); ++it )
      if ( it->out == net )
      {
        if ( it->kind == wkind::const_ )
          return it->value;
        return std::nullopt;
      }
    return std::nullopt;
  }

  uint32_t net_of( const sbits& bits )
  {
    if ( auto it = net_cache_.find( bits ); it != net_cache_.end() )
      return it->second;
    // runs from LSB
    struct run
    {
      uint32_t net, lo, w;
      bitvec value;
    };
    std::vector<run> runs;
    for ( const auto& b : bits )
    {
      if ( !b.is_real() )
        throw internal_error( "unresolved bit in net construction" );
      if ( !runs.empty() )
      {
        auto& r = runs.back();
        if ( b.net == k_const && r.net == k_const )
        {
          r.value = bitvec::concat( bitvec( 1, b.bit ), r.value );
          ++r.w;
          continue;
        }
        if ( b.net == r.net && b.net != k_const && b.bit == r.lo + r.w )
        {
          ++r.w;
          continue;
        }
      }
      run r{ b.net, b.bit, 1, {} };
      if ( b.net == k_const )
        r.value = bitvec( 1, b.bit );
      runs.push_back( r );
    }
    std::vector<uint32_t> parts;
    for ( auto it = runs.rbegin(); it != runs.rend(); ++it )
    {
      if ( it->net == k_const )
        parts.push_back( wn_.add_const( it->value ) );
      else if ( it->lo == 0 && it->w == wn_.width( it->net ) )
        parts.push_back( it->net );
      else
        parts.push_back( wn_.add_cell( wkind::slice, { it->net }, it->w, false, it->lo ) );
    }
    uint32_t n = parts.size() == 1 ? parts[0] : wn_.add_cell( wkind::concat, parts, static_cast<uint32_t>( bits.size() ) );
    net_cache_[bits] = n;
    return n;
  }

  uint32_t extend( uint32_t n, uint32_t w, bool s )
  {
    uint32_t nw = wn_.width( n );
    if ( nw == w )
      return n;
    if ( nw > w )
      return wn_.add_cell( wkind::slice, { n }, w, false, 0 );
    std::vector<uint32_t> parts;
    if ( s )
    {
      uint32_t sign = wn_.add_cell( wkind::slice, { n }, 1, false, nw - 1 );
      parts.assign( w - nw, sign );
    }
    else
      parts.push_back( wn_.add_const( bitvec( w - nw ) ) );
    parts.push_back( n );
    return wn_.add_cell( wkind::concat, parts, w );
  }

  /* expressions */

  [[noreturn]] void unsupported( const expr& e, const std::string& what )
  {
    throw user_error( e.loc, "unsupported expression: " + what, "lower" );
  }

  uint32_t lower_assign( const expr& e, const inst_scope& sc, uint32_t width )
  {
    auto t = self_type( e, scope_resolver( sc, sigs_ ) );
    uint32_t n = lower( e, sc, std::max( t.width, width ), t.is_signed );
    return extend( n, width, t.is_signed );
  }

  uint32_t lower_self( const expr& e, const inst_scope& sc )
  {
    auto t = self_type( e, scope_resolver( sc, sigs_ ) );
    return lower( e, sc, t.width, t.is_signed );
  }

  uint32_t to_bool( uint32_t n )
  {
    if ( wn_.width( n ) == 1 )
      return n;
    uint32_t z = wn_.add_cell( wkind::eq, { n, wn_.add_const( bitvec( wn_.width( n ) ) ) }, 1 );
    return wn_.add_cell( wkind::not_, { z }, 1 );
  }

  uint32_t lower_bool( const expr& e, const inst_scope& sc ) { return to_bool( lower_self( e, sc ) ); }

  sbit read_signal_bit( uint32_t sid, int64_t b )
  {
    const auto& s = sigs_[sid];
    if ( b < 0 || b >= s.type.width )
      return { k_const, 0 };
    if ( cur_ )
    {
      auto it = cur_->vals.find( sid );
      if ( it != cur_->vals.end() && cur_proc_->k == process::kind::comb && cur_proc_->targets.at( sid )[b] )
      {
        const auto& v = it->second[b];
        if ( !v.is_real() )
          throw user_error( cur_proc_->ab->loc, "'" + s.name + "' is read before it is assigned in a combinational block (latch)",
                            "lower" );
        return v;
      }
    }
    return read_bit( sid, static_cast<uint32_t>( b ), s.name );
  }

  uint32_t read_span( uint32_t sid, int64_t lo, uint32_t w )
  {
    sbits b;
    for ( uint32_t i = 0; i < w; ++i )
      b.push_back( read_signal_bit( sid, lo + i ) );
    return net_of( b );
  }

  uint32_t signal_of( const expr& e, const inst_scope& sc )
  {
    auto it = sc.signals.find( e.name );
    if ( it == sc.signals.end() )
      throw user_error( e.loc, "undeclared identifier '" + e.name + "'", "lower" );
    return it->second;
  }

  /* shift amount addressing the low bit of a variable select; second: amount is signed */
  std::pair<uint32_t, bool> select_shift( const expr& e, const inst_scope& sc, uint32_t w )
  {
    const auto& s = sigs_[signal_of( e, sc )];
    bool descending = s.range.msb >= s.range.lsb;
    int64_t a = 0;
    bool up = e.kind == expr_kind::index || e.op == "+:";
    if ( descending )
      a = -s.range.lsb - ( up ? 0 : static_cast<int64_t>( w ) - 1 );
    else
      a = s.range.lsb - ( up && e.kind != expr_kind::index ? static_cast<int64_t>( w ) - 1 : 0 );
    const expr& base = e.operands[0];
    auto tb = self_type( base, scope_resolver( sc, sigs_ ) );
    uint32_t bn = lower( base, sc, tb.width, tb.is_signed );
    if ( descending && a == 0 && !tb.is_signed )
      return { bn, false };
    uint32_t ws = std::max<uint32_t>( tb.width, 33 ) + 2;
    uint32_t be = extend( bn, ws, tb.is_signed );
    uint32_t ac = wn_.add_const( bitvec( 64, static_cast<uint64_t>( a ) ).resized( ws, true ) );
    uint32_t sh = descending ? wn_.add_cell( wkind::add, { be, ac }, ws ) : wn_.add_cell( wkind::sub, { ac, be }, ws );
    return { sh, true };
  }

  uint32_t lower( const expr& e, const inst_scope& sc, uint32_t w, bool s )
  {
    scope_resolver r( sc, sigs_ );
    if ( is_const( e, sc ) )
      return wn_.add_const( eval_context( e, r, w, s ) );
    switch ( e.kind )
    {
    case expr_kind::number:
    case expr_kind::fill:
      break;
    case expr_kind::ident:
    {
      uint32_t sid = signal_of( e, sc );
      return extend( read_span( sid, 0, sigs_[sid].type.width ), w, s );
    }
    case expr_kind::unary:
    {
      const auto& op = e.op;
      if ( op == "+" )
        return lower( e.operands[0], sc, w, s );
      if ( op == "-" )
        return wn_.add_cell( wkind::sub, { wn_.add_const( bitvec( w ) ), lower( e.operands[0], sc, w, s ) }, w );
      if ( op == "~" )
        return wn_.add_cell( wkind::not_, { lower( e.operands[0], sc, w, s ) }, w );
      uint32_t v = lower_self( e.operands[0], sc );
      uint32_t vw = wn_.width( v );
      uint32_t b = 0;
      if ( op == "!" || op == "~|" )
        b = wn_.add_cell( wkind::eq, { v, wn_.add_const( bitvec( vw ) ) }, 1 );
      else if ( op == "|" )
        b = to_bool( v );
      else if ( op == "&" || op == "~&" )
      {
        b = wn_.add_cell( wkind::eq, { v, wn_.add_const( bitvec::ones( vw ) ) }, 1 );
        if ( op == "~&" )
          b = wn_.add_cell( wkind::not_, { b }, 1 );
      }
      else if ( op == "^" || op == "~^" )
      {
        b = reduce_xor( v );
        if ( op == "~^" )
          b = wn_.add_cell( wkind::not_, { b }, 1 );
      }
      else
        unsupported( e, "operator '" + op + "'" );
      return extend( b, w, false );
    }
    case expr_kind::binary:
    {
      const auto& op = e.op;
      if ( op == "&&" || op == "||" )
      {
        uint32_t a = lower_bool( e.operands[0], sc ), b = lower_bool( e.operands[1], sc );
        return extend( wn_.add_cell( op == "&&" ? wkind::and_ : wkind::or_, { a, b }, 1 ), w, false );
      }
      if ( is_compare_binary( op ) )
      {
        auto ta = self_type( e.operands[0], r ), tb = self_type( e.operands[1], r );
        uint32_t cw = std::max( ta.width, tb.width );
        bool cs = ta.is_signed && tb.is_signed;
        uint32_t a = lower( e.operands[0], sc, cw, cs ), b = lower( e.operands[1], sc, cw, cs );
        uint32_t y = 0;
        if ( op == "==" || op == "===" )
          y = wn_.add_cell( wkind::eq, { a, b }, 1 );
        else if ( op == "!=" || op == "!==" )
          y = wn_.add_cell( wkind::not_, { wn_.add_cell( wkind::eq, { a, b }, 1 ) }, 1 );
        else if ( op == "<" )
          y = wn_.add_cell( wkind::lt, { a, b }, 1, cs );
        else if ( op == ">" )
          y = wn_.add_cell( wkind::lt, { b, a }, 1, cs );
        else if ( op == "<=" )
          y = wn_.add_cell( wkind::not_, { wn_.add_cell( wkind::lt, { b, a }, 1, cs ) }, 1 );
        else
          y = wn_.add_cell( wkind::not_, { wn_.add_cell( wkind::lt, { a, b }, 1, cs ) }, 1 );
        return extend( y, w, false );
      }
      if ( is_shift_binary( op ) )
      {
        if ( op == "**" )
          unsupported( e, "non-constant '**'" );
        uint32_t a = lower( e.operands[0], sc, w, s );
        uint32_t n = lower_self( e.operands[1], sc );
        if ( op == "<<" || op == "<<<" )
          return wn_.add_cell( wkind::shl, { a, n }, w );
        return wn_.add_cell( wkind::shr, { a, n }, w, op == ">>>" && s );
      }
      if ( op == "/" || op == "%" )
        unsupported( e, "non-constant '" + op + "'" );
      uint32_t a = lower( e.operands[0], sc, w, s );
      uint32_t b = lower( e.operands[1], sc, w, s );
      if ( op == "+" )
        return wn_.add_cell( wkind::add, { a, b }, w );
      if ( op == "-" )
        return wn_.add_cell( wkind::sub, { a, b }, w );
      if ( op == "*" )
        return wn_.add_cell( wkind::mul, { a, b }, w, s );
      if ( op == "&" )
        return wn_.add_cell( wkind::and_, { a, b }, w );
      if ( op == "|" )
        return wn_.add_cell( wkind::or_, { a, b }, w );
      if ( op == "^" )
        return wn_.add_cell( wkind::xor_, { a, b }, w );
      if ( op == "~^" )
        return wn_.add_cell( wkind::not_, { wn_.add_cell( wkind::xor_, { a, b }, w ) }, w );
      unsupported( e, "operator '" + op + "'" );
    }
    case expr_kind::ternary:
    {
      uint32_t c = lower_bool( e.operands[0], sc );
      uint32_t a = lower( e.operands[1], sc, w, s ), b = lower( e.operands[2], sc, w, s );
      return wn_.add_cell( wkind::mux, { c, a, b }, w );
    }
    case expr_kind::concat:
    case expr_kind::replicate:
    {
      std::vector<uint32_t> parts;
      size_t first = e.kind == expr_kind::replicate ? 1 : 0;
      for ( size_t i = first; i < e.operands.size(); ++i )
        parts.push_back( lower_self( e.operands[i], sc ) );
      if ( e.kind == expr_kind::replicate )
      {
        int64_t n = eval_int( e.operands[0], r );
        std::vector<uint32_t> one = parts;
        for ( int64_t i = 1; i < n; ++i )
          parts.insert( parts.end(), one.begin(), one.end() );
      }
      uint32_t tw = 0;
      for ( auto p : parts )
        tw += wn_.width( p );
      uint32_t n = parts.size() == 1 ? parts[0] : wn_.add_cell( wkind::concat, parts, tw );
      return extend( n, w, s );
    }
    case expr_kind::index:
    case expr_kind::range_select:
    case expr_kind::indexed_select:
    {
      uint32_t sid = signal_of( e, sc );
      if ( auto sp = const_span( e, sc ) )
        return extend( read_span( sid, sp->low, sp->width ), w, s );
      uint32_t sw = e.kind == expr_kind::index ? 1 : static_cast<uint32_t>( eval_int( e.operands[1], r ) );
      auto [shamt, is_signed] = select_shift( e, sc, sw );
      uint32_t data = read_span( sid, 0, sigs_[sid].type.width );
      return extend( wn_.add_cell( wkind::shiftx, { data, shamt }, sw, is_signed ), w, s );
    }
    case expr_kind::call:
      if ( e.name == "$clog2" )
        unsupported( e, "non-constant $clog2" );
      return extend( lower_self( e.operands[0], sc ), w, s );
    }
    unsupported( e, "bad expression" );
  }

  uint32_t reduce_xor( uint32_t v )
  {
    std::vector<uint32_t> bits;
    for ( uint32_t i = 0; i < wn_.width( v ); ++i )
      bits.push_back( wn_.width( v ) == 1 ? v : wn_.add_cell( wkind::slice, { v }, 1, false, i ) );
    while ( bits.size() > 1 )
    {
      std::vector<uint32_t> next;
      for ( size_t i = 0; i + 1 < bits.size(); i += 2 )
        next.push_back( wn_.add_cell( wkind::xor_, { bits[i], bits[i + 1] }, 1 ) );
      if ( bits.size() % 2 )
        next.push_back( bits.back() );
      bits = std::move( next );
    }
    return bits[0];
  }
};

} // namespace

word_netlist lower_words( const ast& elaborated, const std::string& top )
{
  return lowerer( elaborated ).run( top );
}

} // namespace svsyn
