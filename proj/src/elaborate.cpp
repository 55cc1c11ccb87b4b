#include "svsyn/elaborate.hpp"

#include "svsyn/eval.hpp"
#include "svsyn/frontend.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

namespace svsyn
{

namespace
{

struct symbol
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
  bool has_range = false; // types: print a packed range
  bitvec value;           // constants
  std::string flat;       // signals: emitted name
};

struct scope
{
  const scope* parent = nullptr;
  std::map<std::string, symbol> syms;

  const symbol* find( const std::string& n ) const
  {
    for ( auto s = this; s; s = s->parent )
      if ( auto it = s->syms.find( n ); it != s->syms.end() )
        return &it->second;
    return nullptr;
  }
};

class scope_resolver : public name_resolver
{
public:
  explicit scope_resolver( const scope& s ) : s_( s ) {}

  std::optional<vtype> type_of( const std::string& name ) const override
  {
    auto sym = s_.find( name );
    if ( !sym || sym->k == symbol::kind::type )
      return std::nullopt;
    return sym->type;
  }
  std::optional<bitvec> value_of( const std::string& name ) const override
  {
    auto sym = s_.find( name );
    if ( !sym || sym->k != symbol::kind::constant )
      return std::nullopt;
    return sym->value;
  }
  decl_range range_of( const std::string& name ) const override
  {
    auto sym = s_.find( name );
    return sym ? sym->range : name_resolver::range_of( name );
  }

private:
  const scope& s_;
};

struct resolved_type
{
  vtype type;
  decl_range range;
  bool has_range = false;
  bool untyped = false; // parameters without keyword or range
};

std::string value_text( const param_value& v )
{
  if ( v.is_signed && v.value.msb() )
    return "-" + v.value.negated().to_dec();
  return v.value.to_dec();
}

uint64_t fnv1a( const std::string& s )
{
  uint64_t h = 0xcbf29ce484222325ull;
  for ( unsigned char c : s )
  {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string index_text( int64_t v )
{
  return v < 0 ? "n" + std::to_string( -v ) : std::to_string( v );
}

void collect_idents( const expr& e, std::set<std::string>& out )
{
  if ( e.kind == expr_kind::ident || e.kind == expr_kind::index || e.kind == expr_kind::range_select ||
       e.kind == expr_kind::indexed_select )
    out.insert( e.name );
  for ( const auto& o : e.operands )
    collect_idents( o, out );
}

void collect_type_deps( const data_type& t, std::set<std::string>& out )
{
  if ( t.keyword == type_keyword::named )
    out.insert( t.type_name );
  if ( t.packed )
  {
    collect_idents( t.packed->msb, out );
    collect_idents( t.packed->lsb, out );
  }
}

expr integer_literal( int64_t v )
{
  return expr::integer( v );
}

data_type emitted_type( const resolved_type& rt )
{
  data_type t;
  t.keyword = type_keyword::logic;
  t.is_signed = rt.type.is_signed;
  if ( rt.has_range )
    t.packed = range{ integer_literal( rt.range.msb ), integer_literal( rt.range.lsb ) };
  return t;
}

struct module_ctx
{
  module_decl out;
  std::set<std::string> used_names;
  nlohmann::ordered_json names = nlohmann::ordered_json::object();
  std::vector<module_item> behavior; // emitted after declarations of a scope
};

class elaborator
{
public:
  elaborator( const ast& design, const elab_options& opts, bool lenient = false )
      : design_( design ), opts_( opts ), lenient_( lenient ) {}

  std::string instantiate( const module_decl& m, const param_env& given, bool is_top, uint32_t depth, const source_loc& loc )
  {
    if ( depth > opts_.max_depth )
      throw user_error( loc, "instance nesting deeper than " + std::to_string( opts_.max_depth ) + " at module '" + m.name + "'",
                        "elab" );
    scope sc;
    auto overridable = overridable_params( m );
    for ( const auto& [n, _] : given )
      if ( std::none_of( overridable.begin(), overridable.end(), [&]( auto* p ) { return p->name == n; } ) )
        throw user_error( loc, "module '" + m.name + "' has no parameter '" + n + "'", "elab" );

    evaluate_module_constants( m, sc, given );

    elab_instance_key key;
    key.module = m.name;
    for ( const auto* p : overridable )
    {
      const auto* s = sc.find( p->name );
      key.params.emplace_back( p->name, param_value{ s->value, s->type.is_signed } );
    }
    std::string name = ( is_top || overridable.empty() ) ? m.name : key.uniquified_name();
    if ( auto it = keys_.find( name ); it != keys_.end() )
    {
      if ( !( it->second == key ) )
        throw user_error( loc, "uniquified name collision for '" + name + "': " + it->second.text() + " vs " + key.text(), "elab" );
      return name;
    }
    if ( name != m.name && design_.find( name ) )
      throw user_error( loc, "uniquified name '" + name + "' clashes with a declared module", "elab" );
    keys_.emplace( name, key );

    module_ctx ctx;
    ctx.out.name = name;
    ctx.out.loc = m.loc;
    for ( const auto& p : m.ports )
    {
      auto rt = resolve_type( p.type, sc, p.loc, false );
      declare_signal( sc, p.name, rt, "", "", ctx, p.loc );
      port_decl op;
      op.dir = p.dir;
      op.type = emitted_type( rt );
      op.name = p.name;
      ctx.out.ports.push_back( std::move( op ) );
    }
    // header localparams are emitted as body localparams
    for ( const auto& p : m.params )
      if ( p.is_local )
        emit_localparam( p.name, *sc.find( p.name ), ctx );
    items( m.items, sc, "", "", ctx, depth, true );
    // all declarations lead the module body, whatever scope they came from
    std::stable_partition( ctx.out.items.begin(), ctx.out.items.end(), []( const module_item& it ) {
      return std::holds_alternative<param_decl>( it.node ) || std::holds_alternative<net_decl>( it.node );
    } );

    nlohmann::ordered_json entry;
    entry["module"] = m.name;
    entry["params"] = nlohmann::ordered_json::object();
    for ( const auto& [pn, pv] : key.params )
      entry["params"][pn] = { { "value", value_text( pv ) }, { "width", pv.value.width() }, { "signed", pv.is_signed } };
    entry["names"] = ctx.names;
    map_[name] = entry;
    out_[name] = std::move( ctx.out );
    return name;
  }

  std::vector<module_item> unroll_item( const module_item& item, const param_env& env )
  {
    scope sc;
    for ( const auto& [n, v] : env )
    {
      symbol s;
      s.k = symbol::kind::constant;
      s.type = { v.value.width(), v.is_signed };
      s.range = { static_cast<int64_t>( v.value.width() ) - 1, 0 };
      s.value = v.value;
      sc.syms[n] = s;
    }
    module_ctx ctx;
    items( { item }, sc, "", "", ctx, 0, false );
    return std::move( ctx.out.items );
  }

  std::map<std::string, module_decl> out_;
  nlohmann::ordered_json map_ = nlohmann::ordered_json::object();

private:
  const ast& design_;
  elab_options opts_;
  bool lenient_;
  std::map<std::string, elab_instance_key> keys_;

  static std::vector<const param_decl*> overridable_params( const module_decl& m )
  {
    std::vector<const param_decl*> ps;
    for ( const auto& p : m.params )
      if ( !p.is_local )
        ps.push_back( &p );
    for ( const auto& it : m.items )
      if ( auto p = std::get_if<param_decl>( &it.node ); p && !p->is_local )
        ps.push_back( p );
    return ps;
  }

  /* constants */

  void evaluate_module_constants( const module_decl& m, scope& sc, const param_env& given )
  {
    struct node
    {
      const param_decl* p = nullptr;
      const typedef_decl* t = nullptr;
      std::vector<std::string> defines;
      std::set<std::string> deps;
    };
    std::vector<node> nodes;
    auto add_param = [&]( const param_decl& p ) {
      node n;
      n.p = &p;
      n.defines = { p.name };
      collect_type_deps( p.type, n.deps );
      if ( p.value )
        collect_idents( *p.value, n.deps );
      nodes.push_back( std::move( n ) );
    };
    for ( const auto& p : m.params )
      add_param( p );
    for ( const auto& it : m.items )
    {
      if ( auto p = std::get_if<param_decl>( &it.node ) )
        add_param( *p );
      else if ( auto t = std::get_if<typedef_decl>( &it.node ) )
      {
        node n;
        n.t = t;
        n.defines.push_back( t->name );
        collect_type_deps( t->base, n.deps );
        for ( const auto& mem : t->members )
        {
          n.defines.push_back( mem.name );
          if ( mem.value )
            collect_idents( *mem.value, n.deps );
        }
        nodes.push_back( std::move( n ) );
      }
    }
    std::map<std::string, size_t> definer;
    for ( size_t i = 0; i < nodes.size(); ++i )
      for ( const auto& d : nodes[i].defines )
        definer[d] = i;
    std::vector<std::set<size_t>> deps( nodes.size() );
    for ( size_t i = 0; i < nodes.size(); ++i )
      for ( const auto& d : nodes[i].deps )
        if ( auto it = definer.find( d ); it != definer.end() && it->second != i )
          deps[i].insert( it->second );
        else if ( it != definer.end() && nodes[i].p )
          throw user_error( nodes[i].p->loc, "unresolvable parameter '" + d + "' (self-reference)", "elab" );
    // Kahn's algorithm, ties by declaration order
    std::vector<size_t> pending( nodes.size() );
    std::vector<std::vector<size_t>> users( nodes.size() );
    for ( size_t i = 0; i < nodes.size(); ++i )
    {
      pending[i] = deps[i].size();
      for ( auto d : deps[i] )
        users[d].push_back( i );
    }
    std::set<size_t> ready;
    for ( size_t i = 0; i < nodes.size(); ++i )
      if ( !pending[i] )
        ready.insert( i );
    size_t done = 0;
    while ( !ready.empty() )
    {
      size_t i = *ready.begin();
      ready.erase( ready.begin() );
      ++done;
      if ( nodes[i].p )
      {
        const auto& p = *nodes[i].p;
        std::optional<param_value> ov;
        if ( auto it = given.find( p.name ); it != given.end() && !p.is_local )
          ov = it->second;
        define_param( p, sc, ov );
      }
      else
        define_typedef( *nodes[i].t, sc, "", nullptr );
      for ( auto u : users[i] )
        if ( --pending[u] == 0 )
          ready.insert( u );
    }
    if ( done != nodes.size() )
    {
      std::string names;
      for ( size_t i = 0; i < nodes.size(); ++i )
        if ( pending[i] )
          names += ( names.empty() ? "" : ", " ) + nodes[i].defines[0];
      throw user_error( m.loc, "unresolvable parameters in module '" + m.name + "' (cyclic definition: " + names + ")", "elab" );
    }
  }

  resolved_type resolve_type( const data_type& t, const scope& sc, const source_loc& loc, bool is_param )
  {
    resolved_type rt;
    scope_resolver r( sc );
    switch ( t.keyword )
    {
    case type_keyword::int_:
    case type_keyword::integer:
      if ( t.packed )
        throw user_error( loc, "packed range on integer type", "elab" );
      rt.type = { 32, true };
      rt.range = { 31, 0 };
      rt.has_range = true;
      return rt;
    case type_keyword::named:
    {
      auto s = sc.find( t.type_name );
      if ( !s || s->k != symbol::kind::type )
        throw user_error( loc, "unknown type '" + t.type_name + "'", "elab" );
      if ( t.packed )
        throw user_error( loc, "unsupported construct: packed range on typedef'd type", "unsupported" );
      rt.type = s->type;
      rt.range = s->range;
      rt.has_range = s->has_range;
      return rt;
    }
    default:
      break;
    }
    rt.type.is_signed = t.is_signed;
    if ( t.packed )
    {
      rt.range = { eval_int( t.packed->msb, r ), eval_int( t.packed->lsb, r ) };
      int64_t w = rt.range.msb >= rt.range.lsb ? rt.range.msb - rt.range.lsb + 1 : rt.range.lsb - rt.range.msb + 1;
      if ( w > max_width )
        throw user_error( loc, "vector width " + std::to_string( w ) + " too large", "elab" );
      rt.type.width = static_cast<uint32_t>( w );
      rt.has_range = true;
    }
    else
    {
      rt.type.width = 1;
      rt.untyped = is_param && t.keyword == type_keyword::none;
    }
    return rt;
  }

  void define_param( const param_decl& p, scope& sc, const std::optional<param_value>& ov )
  {
    auto rt = resolve_type( p.type, sc, p.loc, true );
    scope_resolver r( sc );
    param_value v;
    if ( ov )
      v = *ov;
    else
    {
      if ( !p.value )
        throw user_error( p.loc, "parameter '" + p.name + "' has no value", "elab" );
      auto t = self_type( *p.value, r );
      if ( rt.untyped )
        v = { eval_context( *p.value, r, t.width, t.is_signed ), t.is_signed };
      else
        v = { eval_assign( *p.value, r, rt.type.width ), t.is_signed };
    }
    symbol s;
    s.k = symbol::kind::constant;
    if ( rt.untyped )
    {
      bool sgn = p.type.is_signed || v.is_signed;
      uint32_t w = std::max<uint32_t>( 32, v.value.width() );
      s.value = v.value.resized( w, v.is_signed );
      s.type = { w, sgn };
      s.range = { static_cast<int64_t>( w ) - 1, 0 };
    }
    else
    {
      s.value = v.value.resized( rt.type.width, v.is_signed );
      s.type = rt.type;
      s.range = rt.has_range ? rt.range : decl_range{ static_cast<int64_t>( rt.type.width ) - 1, 0 };
    }
    sc.syms[p.name] = s;
  }

  void define_typedef( const typedef_decl& t, scope& sc, const std::string& suffix, module_ctx* ctx )
  {
    resolved_type rt;
    if ( t.is_enum && t.base.keyword == type_keyword::none && !t.base.packed )
    {
      rt.type = { 32, true };
      rt.range = { 31, 0 };
      rt.has_range = true;
    }
    else
      rt = resolve_type( t.base, sc, t.loc, false );
    symbol ts;
    ts.k = symbol::kind::type;
    ts.type = rt.type;
    ts.range = rt.range;
    ts.has_range = rt.has_range;
    if ( !ts.has_range )
      ts.range = { static_cast<int64_t>( rt.type.width ) - 1, 0 };
    sc.syms[t.name] = ts;
    if ( !t.is_enum )
      return;
    bitvec next( rt.type.width, 0 );
    std::set<bitvec> seen;
    for ( const auto& mem : t.members )
    {
      scope_resolver r( sc );
      bitvec v = mem.value ? eval_assign( *mem.value, r, rt.type.width ) : next;
      if ( !seen.insert( v ).second )
        throw user_error( t.loc, "duplicate enum value for '" + mem.name + "'", "elab" );
      symbol s;
      s.k = symbol::kind::constant;
      s.type = rt.type;
      s.range = ts.range;
      s.value = v;
      sc.syms[mem.name] = s;
      next = v + bitvec( rt.type.width, 1 );
      if ( ctx )
        emit_localparam( mem.name + suffix, s, *ctx );
    }
  }

  void emit_localparam( const std::string& flat, const symbol& s, module_ctx& ctx )
  {
    if ( !ctx.used_names.insert( flat ).second )
      throw user_error( "name collision on '" + flat + "' after generate flattening" );
    param_decl p;
    p.is_local = true;
    p.type.keyword = type_keyword::none;
    p.type.is_signed = s.type.is_signed;
    p.type.packed = range{ integer_literal( static_cast<int64_t>( s.type.width ) - 1 ), integer_literal( 0 ) };
    p.name = flat;
    p.value = expr::number( s.value, s.type.is_signed );
    ctx.out.items.push_back( { std::move( p ) } );
  }

  void declare_signal( scope& sc, const std::string& name, const resolved_type& rt, const std::string& suffix,
                       const std::string& path, module_ctx& ctx, const source_loc& loc )
  {
    std::string flat = name + suffix;
    if ( !ctx.used_names.insert( flat ).second )
      throw user_error( loc, "name collision on '" + flat + "' after generate flattening", "elab" );
    if ( !suffix.empty() || !path.empty() )
      ctx.names[flat] = path + name;
    symbol s;
    s.k = symbol::kind::signal;
    s.type = rt.type;
    s.range = rt.has_range ? rt.range : decl_range{ static_cast<int64_t>( rt.type.width ) - 1, 0 };
    s.flat = flat;
    sc.syms[name] = s;
  }

  /* items */

  void items( const std::vector<module_item>& its, scope& sc, const std::string& suffix, const std::string& path,
              module_ctx& ctx, uint32_t depth, bool module_level )
  {
    std::vector<const module_item*> behavior;
    // declarations first so that behavior may reference any name of the scope
    for ( const auto& it : its )
    {
      if ( auto p = std::get_if<param_decl>( &it.node ) )
      {
        if ( !module_level )
          define_param( *p, sc, std::nullopt );
        if ( p->is_local || !module_level )
          emit_localparam( p->name + suffix, *sc.find( p->name ), ctx );
      }
      else if ( auto t = std::get_if<typedef_decl>( &it.node ) )
      {
        if ( module_level )
        {
          if ( t->is_enum )
            for ( const auto& mem : t->members )
              emit_localparam( mem.name + suffix, *sc.find( mem.name ), ctx );
        }
        else
          define_typedef( *t, sc, suffix, &ctx );
      }
      else if ( auto n = std::get_if<net_decl>( &it.node ) )
      {
        auto rt = resolve_type( n->type, sc, n->loc, false );
        declare_signal( sc, n->name, rt, suffix, path, ctx, n->loc );
        net_decl d;
        d.type = emitted_type( rt );
        d.name = n->name + suffix;
        ctx.out.items.push_back( { std::move( d ) } );
        if ( n->init )
          behavior.push_back( &it );
      }
      else if ( std::holds_alternative<genvar_decl>( it.node ) )
      {
      }
      else
        behavior.push_back( &it );
    }
    for ( const auto* it : behavior )
      behavior_item( *it, sc, suffix, path, ctx, depth );
  }

  void behavior_item( const module_item& it, scope& sc, const std::string& suffix, const std::string& path, module_ctx& ctx,
                      uint32_t depth )
  {
    if ( auto n = std::get_if<net_decl>( &it.node ) )
    {
      continuous_assign a;
      a.lhs = expr::ident( sc.find( n->name )->flat );
      a.rhs = subst( *n->init, sc );
      ctx.out.items.push_back( { std::move( a ) } );
    }
    else if ( auto a = std::get_if<continuous_assign>( &it.node ) )
    {
      continuous_assign o;
      o.lhs = subst_lvalue( a->lhs, sc );
      o.rhs = subst( a->rhs, sc );
      o.loc = a->loc;
      ctx.out.items.push_back( { std::move( o ) } );
    }
    else if ( auto ab = std::get_if<always_block>( &it.node ) )
    {
      always_block o;
      o.loc = ab->loc;
      o.posedge = ab->posedge;
      if ( ab->kind == always_kind::comb || ab->kind == always_kind::star )
        o.kind = always_kind::star;
      else
      {
        o.kind = always_kind::edge;
        o.clock = signal_name( ab->clock, sc, ab->loc );
      }
      o.body = subst_stmt( ab->body, sc );
      ctx.out.items.push_back( { std::move( o ) } );
    }
    else if ( auto in = std::get_if<instance>( &it.node ) )
      emit_instance( *in, sc, suffix, path, ctx, depth );
    else if ( auto g = std::get_if<gen_for>( &it.node ) )
    {
      scope_resolver r0( sc );
      int64_t v = eval_int( g->init, r0 );
      std::string label = g->label.empty() ? "genblk" : g->label;
      for ( uint32_t count = 0;; ++count )
      {
        if ( count >= opts_.max_loop_iterations )
          throw user_error( g->loc, "generate loop exceeds " + std::to_string( opts_.max_loop_iterations ) + " iterations", "elab" );
        scope body;
        body.parent = &sc;
        symbol gv;
        gv.k = symbol::kind::constant;
        gv.type = { 32, true };
        gv.range = { 31, 0 };
        gv.value = bitvec( 32, static_cast<uint64_t>( v ) );
        body.syms[g->genvar] = gv;
        scope_resolver r( body );
        if ( eval_self( g->cond, r ).is_zero() )
          break;
        items( g->body, body, suffix + "__" + index_text( v ), path + label + "[" + std::to_string( v ) + "].", ctx, depth,
               false );
        scope step;
        step.parent = &sc;
        step.syms[g->genvar] = gv;
        int64_t nv = eval_int( g->step, scope_resolver( step ) );
        v = static_cast<int32_t>( static_cast<uint32_t>( nv ) );
      }
    }
    else if ( auto g = std::get_if<gen_if>( &it.node ) )
    {
      scope_resolver r( sc );
      bool c = !eval_self( g->cond, r ).is_zero();
      const auto& chosen = c ? g->then_items : g->else_items;
      const auto& label = c ? g->then_label : g->else_label;
      scope body;
      body.parent = &sc;
      items( chosen, body, suffix, label.empty() ? path : path + label + ".", ctx, depth, false );
    }
  }

  void emit_instance( const instance& in, scope& sc, const std::string& suffix, const std::string& path, module_ctx& ctx,
                      uint32_t depth )
  {
    const module_decl* child = design_.find( in.module );
    if ( !child )
      throw user_error( in.loc, "unknown module '" + in.module + "'", "unknown-module" );
    auto overridable = overridable_params( *child );
    std::vector<const param_decl*> positional;
    for ( const auto& p : child->params )
      if ( !p.is_local )
        positional.push_back( &p );
    if ( child->params.empty() )
      positional = overridable;
    param_env env;
    scope_resolver r( sc );
    for ( size_t i = 0; i < in.params.size(); ++i )
    {
      const auto& b = in.params[i];
      std::string pname = b.name;
      if ( pname.empty() )
      {
        if ( i >= positional.size() )
          throw user_error( in.loc, "too many parameter values for module '" + in.module + "'", "elab" );
        pname = positional[i]->name;
      }
      if ( !b.value )
        continue;
      auto t = self_type( *b.value, r );
      env[pname] = { eval_context( *b.value, r, t.width, t.is_signed ), t.is_signed };
    }
    std::string emitted = instantiate( *child, env, false, depth + 1, in.loc );

    std::string flat = in.name + suffix;
    if ( !ctx.used_names.insert( flat ).second )
      throw user_error( in.loc, "name collision on '" + flat + "' after generate flattening", "elab" );
    if ( !suffix.empty() || !path.empty() )
      ctx.names[flat] = path + in.name;
    instance o;
    o.module = emitted;
    o.name = flat;
    o.loc = in.loc;
    std::set<std::string> bound;
    for ( size_t i = 0; i < in.ports.size(); ++i )
    {
      const auto& b = in.ports[i];
      std::string pname = b.name;
      if ( pname.empty() )
      {
        if ( i >= child->ports.size() )
          throw user_error( in.loc, "too many port connections for module '" + in.module + "'", "elab" );
        pname = child->ports[i].name;
      }
      auto port = std::find_if( child->ports.begin(), child->ports.end(), [&]( auto& p ) { return p.name == pname; } );
      if ( port == child->ports.end() )
        throw user_error( in.loc, "module '" + in.module + "' has no port '" + pname + "'", "elab" );
      if ( !bound.insert( pname ).second )
        throw user_error( in.loc, "port '" + pname + "' connected twice", "elab" );
      named_binding nb;
      nb.name = pname;
      if ( b.value )
        nb.value = port->dir == port_dir::input ? subst( *b.value, sc ) : subst_lvalue( *b.value, sc );
      o.ports.push_back( std::move( nb ) );
    }
    ctx.out.items.push_back( { std::move( o ) } );
  }

  /* expressions */

  std::string signal_name( const std::string& name, const scope& sc, const source_loc& loc )
  {
    auto s = sc.find( name );
    if ( !s )
    {
      if ( lenient_ )
        return name;
      throw user_error( loc, "undeclared identifier '" + name + "'", "elab" );
    }
    if ( s->k != symbol::kind::signal )
      throw user_error( loc, "'" + name + "' is not a signal", "elab" );
    return s->flat;
  }

  bool is_constant( const expr& e, const scope& sc ) const
  {
    if ( e.kind == expr_kind::ident || e.kind == expr_kind::index || e.kind == expr_kind::range_select ||
         e.kind == expr_kind::indexed_select )
    {
      auto s = sc.find( e.name );
      if ( !s || s->k != symbol::kind::constant )
        return false;
    }
    return std::all_of( e.operands.begin(), e.operands.end(), [&]( const expr& o ) { return is_constant( o, sc ); } );
  }

  expr fold_self( const expr& e, const scope& sc )
  {
    auto t = self_type( e, scope_resolver( sc ) );
    return expr::number( eval_context( e, scope_resolver( sc ), t.width, t.is_signed ), t.is_signed, e.loc );
  }

  expr index_expr( const expr& e, const scope& sc )
  {
    if ( is_constant( e, sc ) )
    {
      int64_t v = eval_int( e, scope_resolver( sc ) );
      if ( v >= INT32_MIN && v <= INT32_MAX )
        return integer_literal( v );
    }
    return subst( e, sc );
  }

  expr subst( const expr& e, const scope& sc )
  {
    expr o = e;
    switch ( e.kind )
    {
    case expr_kind::number:
      return o;
    case expr_kind::fill:
    {
      auto zero = expr::number( bitvec( 1, 0 ), false, e.loc );
      return e.value.bit( 0 ) ? expr::unary( "~", zero, e.loc ) : zero;
    }
    case expr_kind::ident:
    {
      auto s = sc.find( e.name );
      if ( s && s->k == symbol::kind::constant )
        return expr::number( s->value, s->type.is_signed, e.loc );
      o.name = signal_name( e.name, sc, e.loc );
      return o;
    }
    case expr_kind::unary:
    case expr_kind::binary:
    case expr_kind::ternary:
    case expr_kind::concat:
      for ( auto& op : o.operands )
        op = subst( op, sc );
      return o;
    case expr_kind::replicate:
      o.operands[0] = integer_literal( eval_int( e.operands[0], scope_resolver( sc ) ) );
      for ( size_t i = 1; i < o.operands.size(); ++i )
        o.operands[i] = subst( o.operands[i], sc );
      return o;
    case expr_kind::call:
      if ( e.name == "$clog2" && is_constant( e, sc ) )
        return integer_literal( eval_int( e, scope_resolver( sc ) ) );
      o.operands[0] = subst( e.operands[0], sc );
      return o;
    case expr_kind::index:
    case expr_kind::range_select:
    case expr_kind::indexed_select:
      break;
    }
    auto s = sc.find( e.name );
    if ( s && s->k == symbol::kind::constant )
    {
      if ( !is_constant( e, sc ) )
        throw user_error( e.loc, "unsupported construct: variable select of constant '" + e.name + "'", "unsupported" );
      return fold_self( e, sc );
    }
    o.name = signal_name( e.name, sc, e.loc );
    if ( e.kind == expr_kind::index )
    {
      o.operands[0] = index_expr( e.operands[0], sc );
      return o;
    }
    scope_resolver r( sc );
    if ( e.kind == expr_kind::range_select )
    {
      o.operands[0] = integer_literal( eval_int( e.operands[0], r ) );
      o.operands[1] = integer_literal( eval_int( e.operands[1], r ) );
      return o;
    }
    int64_t w = eval_int( e.operands[1], r );
    if ( w <= 0 || w > max_width )
      throw user_error( e.loc, "indexed part-select width out of range", "elab" );
    if ( is_constant( e.operands[0], sc ) )
    {
      int64_t base = eval_int( e.operands[0], r );
      int64_t i0 = e.op == "+:" ? base : base - w + 1;
      int64_t i1 = i0 + w - 1;
      if ( i0 >= INT32_MIN && i1 <= INT32_MAX )
      {
        decl_range rg = s ? s->range : decl_range{ i1, i0 };
        o.kind = expr_kind::range_select;
        o.op.clear();
        bool desc = rg.msb >= rg.lsb;
        o.operands = { integer_literal( desc ? i1 : i0 ), integer_literal( desc ? i0 : i1 ) };
        return o;
      }
    }
    o.operands[0] = subst( e.operands[0], sc );
    o.operands[1] = integer_literal( w );
    return o;
  }

  expr subst_lvalue( const expr& e, const scope& sc )
  {
    switch ( e.kind )
    {
    case expr_kind::ident:
    case expr_kind::index:
    case expr_kind::range_select:
    case expr_kind::indexed_select:
    {
      auto s = sc.find( e.name );
      if ( s && s->k != symbol::kind::signal )
        throw user_error( e.loc, "cannot assign to '" + e.name + "'", "elab" );
      return subst( e, sc );
    }
    case expr_kind::concat:
    {
      expr o = e;
      for ( auto& op : o.operands )
        op = subst_lvalue( op, sc );
      return o;
    }
    default:
      throw user_error( e.loc, "invalid assignment target", "elab" );
    }
  }

  stmt subst_stmt( const stmt& s, const scope& sc )
  {
    stmt o;
    o.kind = s.kind;
    o.loc = s.loc;
    switch ( s.kind )
    {
    case stmt_kind::null:
      break;
    case stmt_kind::block:
      for ( const auto& c : s.body )
        o.body.push_back( subst_stmt( c, sc ) );
      break;
    case stmt_kind::blocking:
    case stmt_kind::nonblocking:
      o.lhs = subst_lvalue( s.lhs, sc );
      o.rhs = subst( s.rhs, sc );
      break;
    case stmt_kind::if_:
      o.cond = subst( s.cond, sc );
      for ( const auto& c : s.body )
        o.body.push_back( subst_stmt( c, sc ) );
      break;
    case stmt_kind::case_:
      o.cond = subst( s.cond, sc );
      for ( const auto& ci : s.items )
      {
        case_item c;
        for ( const auto& l : ci.labels )
          c.labels.push_back( subst( l, sc ) );
        for ( const auto& b : ci.body )
          c.body.push_back( subst_stmt( b, sc ) );
        o.items.push_back( std::move( c ) );
      }
      break;
    }
    return o;
  }
};

void lvalue_names( const expr& e, std::set<std::string>& out )
{
  if ( e.kind == expr_kind::concat )
  {
    for ( const auto& o : e.operands )
      lvalue_names( o, out );
    return;
  }
  out.insert( e.name );
}

void stmt_targets( const stmt& s, std::set<std::string>& out )
{
  if ( s.kind == stmt_kind::blocking || s.kind == stmt_kind::nonblocking )
    lvalue_names( s.lhs, out );
  for ( const auto& c : s.body )
    stmt_targets( c, out );
  for ( const auto& ci : s.items )
    for ( const auto& b : ci.body )
      stmt_targets( b, out );
}

void item_targets( const std::vector<module_item>& items, std::set<std::string>& out )
{
  for ( const auto& it : items )
  {
    if ( auto a = std::get_if<always_block>( &it.node ) )
      stmt_targets( a->body, out );
    else if ( auto g = std::get_if<gen_for>( &it.node ) )
      item_targets( g->body, out );
    else if ( auto gi = std::get_if<gen_if>( &it.node ) )
    {
      item_targets( gi->then_items, out );
      item_targets( gi->else_items, out );
    }
  }
}

bool is_pure_literal( const expr& e )
{
  if ( e.kind == expr_kind::number )
    return true;
  return e.kind == expr_kind::unary && ( e.op == "-" || e.op == "~" ) && is_pure_literal( e.operands[0] );
}

} // namespace

std::string elab_instance_key::text() const
{
  std::string s = module + "#(";
  for ( size_t i = 0; i < params.size(); ++i )
  {
    const auto& [n, v] = params[i];
    s += ( i ? "," : "" ) + n + "=" + std::to_string( v.value.width() ) + ( v.is_signed ? "'sh" : "'h" ) + v.value.to_hex();
  }
  return s + ")";
}

std::string elab_instance_key::uniquified_name() const
{
  char buf[17];
  std::snprintf( buf, sizeof buf, "%016llx", static_cast<unsigned long long>( fnv1a( text() ) ) );
  return module + "__P" + std::string( buf, 8 );
}

param_value parse_param_value( const std::string& text )
{
  auto r = parse_text( "module __value; localparam __v = " + text + "; endmodule", "<param>" );
  if ( !r.ok() || r.design.modules.size() != 1 || r.design.modules[0].items.size() != 1 )
    throw user_error( "invalid parameter value '" + text + "'" );
  const auto& p = std::get<param_decl>( r.design.modules[0].items[0].node );
  struct no_names : name_resolver
  {
    std::optional<vtype> type_of( const std::string& ) const override { return std::nullopt; }
    std::optional<bitvec> value_of( const std::string& ) const override { return std::nullopt; }
  } none;
  auto t = self_type( *p.value, none );
  return { eval_context( *p.value, none, t.width, t.is_signed ), t.is_signed };
}

elab_result elaborate( const ast& design, const std::string& top, const param_env& overrides, const elab_options& opts )
{
  const module_decl* m = design.find( top );
  if ( !m )
    throw user_error( "top module '" + top + "' not found" );
  elaborator el( design, opts );
  el.instantiate( *m, overrides, true, 0, m->loc );
  ast staged;
  for ( auto& [name, mod] : el.out_ )
    staged.modules.push_back( mod );
  elab_result res;
  res.top = top;
  nlohmann::ordered_json map = nlohmann::ordered_json::object();
  for ( const auto& name : dependency_order( staged ) )
  {
    res.design.modules.push_back( *staged.find( name ) );
    map[name] = el.map_[name];
  }
  res.map_json = map.dump( 2 ) + "\n";
  return res;
}

std::vector<module_item> unroll( const module_item& item, const param_env& env, const elab_options& opts )
{
  ast empty;
  elaborator el( empty, opts, true );
  return el.unroll_item( item, env );
}

std::vector<std::string> procedural_targets( const module_decl& m )
{
  std::set<std::string> out;
  item_targets( m.items, out );
  return { out.begin(), out.end() };
}

std::string emit_verilog( const ast& elaborated )
{
  std::map<std::string, std::set<std::string>> regs;
  for ( const auto& m : elaborated.modules )
  {
    if ( !m.params.empty() )
      throw internal_error( "parameter survived elaboration in module '" + m.name + "'" );
    for ( const auto& it : m.items )
    {
      if ( auto p = std::get_if<param_decl>( &it.node ) )
      {
        if ( !p->is_local || !p->value || !is_pure_literal( *p->value ) )
          throw internal_error( "non-literal parameter '" + p->name + "' survived elaboration" );
      }
      else if ( std::holds_alternative<gen_for>( it.node ) || std::holds_alternative<gen_if>( it.node ) ||
                std::holds_alternative<genvar_decl>( it.node ) || std::holds_alternative<typedef_decl>( it.node ) )
        throw internal_error( "generate or typedef survived elaboration in module '" + m.name + "'" );
    }
    auto t = procedural_targets( m );
    regs[m.name] = { t.begin(), t.end() };
  }
  emit_options opts;
  opts.lang = dialect::verilog2005;
  opts.is_reg = [&]( const std::string& mod, const std::string& net ) {
    auto it = regs.find( mod );
    return it != regs.end() && it->second.count( net );
  };
  return emit( elaborated, opts );
}

} // namespace svsyn
