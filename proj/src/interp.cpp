#include "svsyn/eval.hpp"
#include "svsyn/verify.hpp"

#include <deque>
#include <set>
#include <unordered_map>

namespace svsyn
{

uint32_t signature::input_bits() const
{
  uint32_t n = 0;
  for ( const auto& p : inputs )
    n += p.width;
  return n;
}

void scalar_model::step( const std::vector<lanes>& in, std::vector<lanes>& out, uint32_t n_lanes )
{
  const auto& s = sig();
  out.assign( s.outputs.size(), lanes{} );
  for ( size_t o = 0; o < s.outputs.size(); ++o )
    out[o].assign( s.outputs[o].width, 0 );
  std::vector<bitvec> vin( s.inputs.size() );
  for ( uint32_t l = 0; l < n_lanes; ++l )
  {
    for ( size_t i = 0; i < s.inputs.size(); ++i )
    {
      bitvec v( s.inputs[i].width );
      for ( uint32_t b = 0; b < s.inputs[i].width; ++b )
        if ( ( in[i][b] >> l ) & 1 )
          v.set_bit( b, true );
      vin[i] = std::move( v );
    }
    auto vout = step_lane( l, vin );
    for ( size_t o = 0; o < s.outputs.size(); ++o )
      for ( uint32_t b = 0; b < s.outputs[o].width; ++b )
        if ( vout[o].bit( b ) )
          out[o][b] |= uint64_t( 1 ) << l;
  }
}

std::vector<std::vector<bitvec>> simulate( sim_model& m, const std::vector<std::vector<bitvec>>& inputs )
{
  const auto& s = m.sig();
  m.reset();
  std::vector<std::vector<bitvec>> trace;
  for ( const auto& cyc : inputs )
  {
    if ( cyc.size() != s.inputs.size() )
      throw user_error( "expected " + std::to_string( s.inputs.size() ) + " input values per cycle" );
    std::vector<lanes> in( s.inputs.size() ), out;
    for ( size_t i = 0; i < s.inputs.size(); ++i )
    {
      if ( cyc[i].width() != s.inputs[i].width )
        throw user_error( "width mismatch on input '" + s.inputs[i].name + "': expected " + std::to_string( s.inputs[i].width ) +
                          ", got " + std::to_string( cyc[i].width() ) );
      in[i].resize( s.inputs[i].width );
      for ( uint32_t b = 0; b < s.inputs[i].width; ++b )
        in[i][b] = cyc[i].bit( b ) ? 1 : 0;
    }
    m.step( in, out, 1 );
    std::vector<bitvec> row;
    for ( size_t o = 0; o < s.outputs.size(); ++o )
    {
      bitvec v( s.outputs[o].width );
      for ( uint32_t b = 0; b < s.outputs[o].width; ++b )
        v.set_bit( b, out[o][b] & 1 );
      row.push_back( v );
    }
    trace.push_back( std::move( row ) );
  }
  return trace;
}

namespace
{

struct isym
{
  enum class kind
  {
    constant,
    signal,
    type
  };
  kind k = kind::signal;
  vtype type;
  decl_range range;
  bitvec value;
  uint32_t sig = 0;
};

struct iscope
{
  const iscope* parent = nullptr;
  std::unordered_map<std::string, isym> syms;

  const isym* find( const std::string& n ) const
  {
    for ( auto s = this; s; s = s->parent )
      if ( auto it = s->syms.find( n ); it != s->syms.end() )
        return &it->second;
    return nullptr;
  }
};

class state_resolver : public name_resolver
{
public:
  state_resolver( const iscope& sc, const std::vector<bitvec>* st ) : sc_( sc ), st_( st ) {}

  std::optional<vtype> type_of( const std::string& name ) const override
  {
    auto s = sc_.find( name );
    if ( !s || s->k == isym::kind::type )
      return std::nullopt;
    return s->type;
  }
  std::optional<bitvec> value_of( const std::string& name ) const override
  {
    auto s = sc_.find( name );
    if ( !s || s->k == isym::kind::type )
      return std::nullopt;
    if ( s->k == isym::kind::constant )
      return s->value;
    if ( !st_ )
      return std::nullopt;
    return ( *st_ )[s->sig];
  }
  decl_range range_of( const std::string& name ) const override
  {
    auto s = sc_.find( name );
    return s ? s->range : name_resolver::range_of( name );
  }

private:
  const iscope& sc_;
  const std::vector<bitvec>* st_;
};

struct signal_info
{
  std::string name;
  uint32_t width = 1;
};

struct process
{
  enum class kind
  {
    assign,
    comb,
    ff
  };
  kind k = kind::assign;
  const iscope* lhs_scope = nullptr;
  const iscope* rhs_scope = nullptr;
  const expr* lhs = nullptr;
  const expr* rhs = nullptr;
  const stmt* body = nullptr;
};

struct target
{
  uint32_t sig;
  int64_t low;
  uint32_t width;
};

class interpreter : public scalar_model
{
public:
  interpreter( const ast& design, const std::string& top, const param_env& overrides ) : design_( design )
  {
    const module_decl* m = design_.find( top );
    if ( !m )
      throw user_error( "top module '" + top + "' not found" );
    iscope& root = build( *m, overrides, top, 0 );
    // clocks: follow plain port bindings upward until a top-level port is reached
    bool changed = true;
    while ( changed )
    {
      changed = false;
      for ( auto [child, parent] : port_source_ )
        if ( clocks_.count( child ) && !clocks_.count( parent ) )
        {
          clocks_.insert( parent );
          changed = true;
        }
    }
    std::set<uint32_t> top_inputs;
    for ( const auto& p : m->ports )
    {
      const isym* s = root.find( p.name );
      if ( p.dir == port_dir::input )
      {
        top_inputs.insert( s->sig );
        if ( clocks_.count( s->sig ) )
          continue;
        sig_.inputs.push_back( { p.name, s->type.width } );
        in_sigs_.push_back( s->sig );
      }
      else
      {
        sig_.outputs.push_back( { p.name, s->type.width } );
        out_sigs_.push_back( s->sig );
      }
    }
    for ( auto c : clock_roots_ )
    {
      uint32_t cur = c;
      for ( bool moved = true; moved; )
      {
        moved = false;
        for ( auto [child, parent] : port_source_ )
          if ( child == cur )
          {
            cur = parent;
            moved = true;
            break;
          }
      }
      if ( !top_inputs.count( cur ) )
        throw user_error( "clock '" + signals_[c].name + "' is not driven by a top-level input" );
    }
    reset();
  }

  const signature& sig() const override { return sig_; }
  bool is_sequential() const override { return has_ff_; }

  void reset() override
  {
    std::vector<bitvec> zero;
    for ( const auto& s : signals_ )
      zero.emplace_back( s.width );
    state_.assign( 64, zero );
  }

protected:
  std::vector<bitvec> step_lane( uint32_t lane, const std::vector<bitvec>& inputs ) override
  {
    auto& st = state_[lane];
    for ( size_t i = 0; i < inputs.size(); ++i )
      st[in_sigs_[i]] = inputs[i];
    settle( st );
    std::vector<bitvec> out;
    for ( auto s : out_sigs_ )
      out.push_back( st[s] );
    if ( has_ff_ )
      clock_edge( st );
    return out;
  }

private:
  ast design_;
  std::deque<iscope> scopes_;
  std::deque<expr> owned_;
  std::vector<signal_info> signals_;
  std::vector<process> procs_;
  std::set<uint32_t> clocks_;
  std::set<uint32_t> clock_roots_;
  std::vector<std::pair<uint32_t, uint32_t>> port_source_; // child port signal <- parent signal
  signature sig_;
  std::vector<uint32_t> in_sigs_, out_sigs_;
  std::vector<std::vector<bitvec>> state_;
  bool has_ff_ = false;

  /* construction */

  iscope& build( const module_decl& m, const param_env& given, const std::string& path, uint32_t depth )
  {
    if ( depth > 64 )
      throw user_error( "instance nesting too deep at '" + path + "'" );
    iscope& sc = scopes_.emplace_back();
    eval_constants( m, sc, given, path );
    for ( const auto& p : m.ports )
    {
      auto [t, rg] = type_of_decl( p.type, sc, false ).value();
      add_signal( sc, p.name, t, rg, path );
    }
    walk( m.items, sc, path, depth );
    return sc;
  }

  uint32_t add_signal( iscope& sc, const std::string& name, vtype t, decl_range rg, const std::string& path )
  {
    isym s;
    s.k = isym::kind::signal;
    s.type = t;
    s.range = rg;
    s.sig = static_cast<uint32_t>( signals_.size() );
    signals_.push_back( { path + "." + name, t.width } );
    sc.syms[name] = s;
    return s.sig;
  }

  /* Returns nullopt for an untyped parameter declaration. */
  std::optional<std::pair<vtype, decl_range>> type_of_decl( const data_type& t, const iscope& sc, bool is_param )
  {
    state_resolver r( sc, nullptr );
    if ( t.keyword == type_keyword::int_ || t.keyword == type_keyword::integer )
      return std::pair{ vtype{ 32, true }, decl_range{ 31, 0 } };
    if ( t.keyword == type_keyword::named )
    {
      const isym* s = sc.find( t.type_name );
      if ( !s || s->k != isym::kind::type )
        throw user_error( "unknown type '" + t.type_name + "'" );
      return std::pair{ s->type, s->range };
    }
    if ( !t.packed )
    {
      if ( is_param && t.keyword == type_keyword::none )
        return std::nullopt;
      return std::pair{ vtype{ 1, t.is_signed }, decl_range{ 0, 0 } };
    }
    decl_range rg{ eval_int( t.packed->msb, r ), eval_int( t.packed->lsb, r ) };
    return std::pair{ vtype{ rg.width(), t.is_signed }, rg };
  }

  void define_param( const param_decl& p, iscope& sc, const param_value* ov )
  {
    state_resolver r( sc, nullptr );
    auto decl = type_of_decl( p.type, sc, true );
    isym s;
    s.k = isym::kind::constant;
    bitvec v;
    bool vs = false;
    if ( ov )
    {
      v = ov->value;
      vs = ov->is_signed;
    }
    else
    {
      if ( !p.value )
        throw user_error( "parameter '" + p.name + "' has no value" );
      auto t = self_type( *p.value, r );
      vs = t.is_signed;
      v = decl ? eval_assign( *p.value, r, decl->first.width ) : eval_self( *p.value, r );
    }
    if ( decl )
    {
      s.type = decl->first;
      s.range = decl->second;
      s.value = v.resized( s.type.width, vs );
    }
    else
    {
      uint32_t w = v.width() < 32 ? 32 : v.width();
      s.type = { w, vs || p.type.is_signed };
      s.range = { w - 1, 0 };
      s.value = v.resized( w, vs );
    }
    sc.syms[p.name] = s;
  }

  void define_typedef( const typedef_decl& t, iscope& sc )
  {
    isym ts;
    ts.k = isym::kind::type;
    if ( t.is_enum && t.base.keyword == type_keyword::none && !t.base.packed )
    {
      ts.type = { 32, true };
      ts.range = { 31, 0 };
    }
    else
    {
      auto d = type_of_decl( t.base, sc, false ).value();
      ts.type = d.first;
      ts.range = d.second;
    }
    sc.syms[t.name] = ts;
    bitvec next( ts.type.width );
    for ( const auto& mem : t.members )
    {
      state_resolver r( sc, nullptr );
      isym c;
      c.k = isym::kind::constant;
      c.type = ts.type;
      c.range = ts.range;
      c.value = mem.value ? eval_assign( *mem.value, r, ts.type.width ) : next;
      next = c.value + bitvec( ts.type.width, 1 );
      sc.syms[mem.name] = c;
    }
  }

  /* Evaluates module-level constants by repeated passes until every one resolves. */
  void eval_constants( const module_decl& m, iscope& sc, const param_env& given, const std::string& path )
  {
    std::vector<const module_item*> pending;
    std::deque<module_item> header;
    for ( const auto& p : m.params )
      pending.push_back( &header.emplace_back( module_item{ p } ) );
    std::set<std::string> known;
    for ( const auto& p : m.params )
      if ( !p.is_local )
        known.insert( p.name );
    for ( const auto& it : m.items )
    {
      if ( auto p = std::get_if<param_decl>( &it.node ) )
      {
        pending.push_back( &it );
        if ( !p->is_local )
          known.insert( p->name );
      }
      else if ( std::holds_alternative<typedef_decl>( it.node ) )
        pending.push_back( &it );
    }
    for ( const auto& [n, v] : given )
      if ( !known.count( n ) )
        throw user_error( "module '" + m.name + "' has no parameter '" + n + "'" );
    while ( !pending.empty() )
    {
      std::vector<const module_item*> later;
      std::string last_error;
      for ( const auto* it : pending )
      {
        iscope trial = sc;
        try
        {
          if ( auto p = std::get_if<param_decl>( &it->node ) )
          {
            auto g = given.find( p->name );
            define_param( *p, trial, ( g != given.end() && !p->is_local ) ? &g->second : nullptr );
          }
          else
            define_typedef( std::get<typedef_decl>( it->node ), trial );
          sc = std::move( trial );
        }
        catch ( const user_error& e )
        {
          later.push_back( it );
          last_error = e.what();
        }
      }
      if ( later.size() == pending.size() )
        throw user_error( "cannot resolve parameters of '" + path + "': " + last_error );
      pending = std::move( later );
    }
  }

  void walk( const std::vector<module_item>& items, iscope& sc, const std::string& path, uint32_t depth )
  {
    for ( const auto& it : items )
    {
      if ( auto n = std::get_if<net_decl>( &it.node ) )
      {
        auto [t, rg] = type_of_decl( n->type, sc, false ).value();
        add_signal( sc, n->name, t, rg, path );
      }
      else if ( sc.parent )
      {
        // generate scopes declare their own constants in order
        if ( auto p = std::get_if<param_decl>( &it.node ) )
          define_param( *p, sc, nullptr );
        else if ( auto t = std::get_if<typedef_decl>( &it.node ) )
          define_typedef( *t, sc );
      }
    }
    for ( const auto& it : items )
    {
      if ( auto n = std::get_if<net_decl>( &it.node ) )
      {
        if ( n->init )
        {
          process p;
          p.lhs_scope = p.rhs_scope = &sc;
          p.lhs = &owned_.emplace_back( expr::ident( n->name ) );
          p.rhs = &*n->init;
          procs_.push_back( p );
        }
      }
      else if ( auto a = std::get_if<continuous_assign>( &it.node ) )
      {
        process p;
        p.lhs_scope = p.rhs_scope = &sc;
        p.lhs = &a->lhs;
        p.rhs = &a->rhs;
        procs_.push_back( p );
      }
      else if ( auto ab = std::get_if<always_block>( &it.node ) )
      {
        process p;
        p.lhs_scope = p.rhs_scope = &sc;
        p.body = &ab->body;
        if ( ab->kind == always_kind::ff || ab->kind == always_kind::edge )
        {
          p.k = process::kind::ff;
          const isym* c = sc.find( ab->clock );
          if ( !c || c->k != isym::kind::signal )
            throw user_error( "unknown clock '" + ab->clock + "'" );
          clocks_.insert( c->sig );
          clock_roots_.insert( c->sig );
          has_ff_ = true;
        }
        else
          p.k = process::kind::comb;
        procs_.push_back( p );
      }
      else if ( auto in = std::get_if<instance>( &it.node ) )
        instantiate( *in, sc, path, depth );
      else if ( auto g = std::get_if<gen_for>( &it.node ) )
      {
        state_resolver r0( sc, nullptr );
        int64_t v = eval_int( g->init, r0 );
        for ( uint32_t n = 0;; ++n )
        {
          if ( n > 65536 )
            throw user_error( "generate loop does not terminate" );
          iscope& body = scopes_.emplace_back();
          body.parent = &sc;
          isym gv;
          gv.k = isym::kind::constant;
          gv.type = { 32, true };
          gv.range = { 31, 0 };
          gv.value = bitvec( 32, static_cast<uint64_t>( v ) );
          body.syms[g->genvar] = gv;
          state_resolver r( body, nullptr );
          if ( eval_self( g->cond, r ).is_zero() )
            break;
          walk( g->body, body, path + "." + ( g->label.empty() ? "genblk" : g->label ) + "[" + std::to_string( v ) + "]",
                depth );
          v = static_cast<int32_t>( static_cast<uint32_t>( eval_int( g->step, r ) ) );
        }
      }
      else if ( auto g = std::get_if<gen_if>( &it.node ) )
      {
        state_resolver r( sc, nullptr );
        bool c = !eval_self( g->cond, r ).is_zero();
        iscope& body = scopes_.emplace_back();
        body.parent = &sc;
        walk( c ? g->then_items : g->else_items, body, path, depth );
      }
    }
  }

  void instantiate( const instance& in, iscope& sc, const std::string& path, uint32_t depth )
  {
    const module_decl* child = design_.find( in.module );
    if ( !child )
      throw user_error( "unknown module '" + in.module + "'" );
    std::vector<std::string> pos_names;
    for ( const auto& p : child->params )
      if ( !p.is_local )
        pos_names.push_back( p.name );
    if ( child->params.empty() )
      for ( const auto& it : child->items )
        if ( auto p = std::get_if<param_decl>( &it.node ); p && !p->is_local )
          pos_names.push_back( p->name );
    param_env env;
    state_resolver r( sc, nullptr );
    for ( size_t i = 0; i < in.params.size(); ++i )
    {
      const auto& b = in.params[i];
      if ( !b.value )
        continue;
      std::string n = b.name.empty() ? ( i < pos_names.size() ? pos_names[i] : "" ) : b.name;
      if ( n.empty() )
        throw user_error( "too many parameter values for '" + in.module + "'" );
      auto t = self_type( *b.value, r );
      env[n] = { eval_self( *b.value, r ), t.is_signed };
    }
    iscope& csc = build( *child, env, path + "." + in.name, depth + 1 );
    for ( size_t i = 0; i < in.ports.size(); ++i )
    {
      const auto& b = in.ports[i];
      std::string n = b.name.empty() ? ( i < child->ports.size() ? child->ports[i].name : "" ) : b.name;
      const port_decl* port = nullptr;
      for ( const auto& p : child->ports )
        if ( p.name == n )
          port = &p;
      if ( !port )
        throw user_error( "module '" + in.module + "' has no port '" + n + "'" );
      if ( !b.value )
        continue;
      const expr* port_ref = &owned_.emplace_back( expr::ident( n ) );
      process p;
      if ( port->dir == port_dir::input )
      {
        p.lhs_scope = &csc;
        p.lhs = port_ref;
        p.rhs_scope = &sc;
        p.rhs = &*b.value;
        if ( b.value->kind == expr_kind::ident )
          if ( const isym* ps = sc.find( b.value->name ); ps && ps->k == isym::kind::signal )
            port_source_.emplace_back( csc.find( n )->sig, ps->sig );
      }
      else
      {
        p.lhs_scope = &sc;
        p.lhs = &*b.value;
        p.rhs_scope = &csc;
        p.rhs = port_ref;
      }
      procs_.push_back( p );
    }
  }

  /* execution */

  void lvalue_targets( const expr& e, const iscope& sc, const std::vector<bitvec>& st, std::vector<target>& out )
  {
    if ( e.kind == expr_kind::concat )
    {
      for ( const auto& o : e.operands )
        lvalue_targets( o, sc, st, out );
      return;
    }
    const isym* s = sc.find( e.name );
    if ( !s || s->k != isym::kind::signal )
      throw user_error( e.loc, "cannot assign to '" + e.name + "'", "interp" );
    state_resolver r( sc, &st );
    switch ( e.kind )
    {
    case expr_kind::ident:
      out.push_back( { s->sig, 0, s->type.width } );
      break;
    case expr_kind::index:
      out.push_back( { s->sig, s->range.position( eval_int( e.operands[0], r ) ), 1 } );
      break;
    case expr_kind::range_select:
    {
      auto sp = range_span( s->range, eval_int( e.operands[0], r ), eval_int( e.operands[1], r ) );
      out.push_back( { s->sig, sp.low, sp.width } );
      break;
    }
    case expr_kind::indexed_select:
    {
      auto sp = indexed_span( s->range, eval_int( e.operands[0], r ), static_cast<uint32_t>( eval_int( e.operands[1], r ) ),
                              e.op == "+:" );
      out.push_back( { s->sig, sp.low, sp.width } );
      break;
    }
    default:
      throw user_error( e.loc, "invalid assignment target", "interp" );
    }
  }

  struct pending_write
  {
    std::vector<target> targets;
    bitvec value;
  };

  pending_write prepare( const expr& lhs, const iscope& lsc, const expr& rhs, const iscope& rsc, const std::vector<bitvec>& st )
  {
    pending_write w;
    lvalue_targets( lhs, lsc, st, w.targets );
    uint32_t width = 0;
    for ( const auto& t : w.targets )
      width += t.width;
    w.value = eval_assign( rhs, state_resolver( rsc, &st ), width );
    return w;
  }

  static void apply( const pending_write& w, std::vector<bitvec>& st )
  {
    int64_t off = 0;
    for ( auto it = w.targets.rbegin(); it != w.targets.rend(); ++it )
    {
      st[it->sig].set_slice( it->low, w.value.slice( off, it->width ) );
      off += it->width;
    }
  }

  void exec( const stmt& s, const iscope& sc, std::vector<bitvec>& st, std::vector<pending_write>* nba )
  {
    switch ( s.kind )
    {
    case stmt_kind::null:
      break;
    case stmt_kind::block:
      for ( const auto& c : s.body )
        exec( c, sc, st, nba );
      break;
    case stmt_kind::blocking:
      if ( nba )
        throw user_error( s.loc, "blocking assignment in clocked block", "interp" );
      apply( prepare( s.lhs, sc, s.rhs, sc, st ), st );
      break;
    case stmt_kind::nonblocking:
      if ( !nba )
        throw user_error( s.loc, "nonblocking assignment in combinational block", "interp" );
      nba->push_back( prepare( s.lhs, sc, s.rhs, sc, st ) );
      break;
    case stmt_kind::if_:
    {
      bool c = !eval_self( s.cond, state_resolver( sc, &st ) ).is_zero();
      if ( c )
        exec( s.body[0], sc, st, nba );
      else if ( s.body.size() > 1 )
        exec( s.body[1], sc, st, nba );
      break;
    }
    case stmt_kind::case_:
    {
      state_resolver r( sc, &st );
      auto t = self_type( s.cond, r );
      uint32_t w = t.width;
      bool sgn = t.is_signed;
      for ( const auto& ci : s.items )
        for ( const auto& l : ci.labels )
        {
          auto lt = self_type( l, r );
          w = std::max( w, lt.width );
          sgn = sgn && lt.is_signed;
        }
      auto subject = eval_context( s.cond, r, w, sgn );
      const case_item* chosen = nullptr;
      for ( const auto& ci : s.items )
      {
        if ( ci.labels.empty() )
          continue;
        for ( const auto& l : ci.labels )
          if ( eval_context( l, r, w, sgn ) == subject )
          {
            chosen = &ci;
            break;
          }
        if ( chosen )
          break;
      }
      if ( !chosen )
        for ( const auto& ci : s.items )
          if ( ci.labels.empty() )
            chosen = &ci;
      if ( chosen )
        exec( chosen->body[0], sc, st, nba );
      break;
    }
    }
  }

  void settle( std::vector<bitvec>& st )
  {
    size_t limit = 2 * procs_.size() + 16;
    for ( size_t iter = 0;; ++iter )
    {
      auto before = st;
      for ( const auto& p : procs_ )
      {
        if ( p.k == process::kind::assign )
          apply( prepare( *p.lhs, *p.lhs_scope, *p.rhs, *p.rhs_scope, st ), st );
        else if ( p.k == process::kind::comb )
          exec( *p.body, *p.lhs_scope, st, nullptr );
      }
      if ( st == before )
        return;
      if ( iter > limit )
        throw user_error( "combinational logic does not settle (combinational loop)" );
    }
  }

  void clock_edge( std::vector<bitvec>& st )
  {
    std::vector<pending_write> nba;
    for ( const auto& p : procs_ )
      if ( p.k == process::kind::ff )
        exec( *p.body, *p.lhs_scope, st, &nba );
    for ( const auto& w : nba )
      apply( w, st );
  }
};

} // namespace

std::unique_ptr<sim_model> make_ast_interpreter( const ast& design, const std::string& top, const param_env& overrides )
{
  return std::make_unique<interpreter>( design, top, overrides );
}

} // namespace svsyn
