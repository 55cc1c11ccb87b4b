#include "svsyn/frontend.hpp"

#include <sstream>

namespace svsyn
{

namespace
{

bool is_primary( const expr& e )
{
  switch ( e.kind )
  {
  case expr_kind::unary:
  case expr_kind::binary:
  case expr_kind::ternary:
    return false;
  case expr_kind::number:
    // a negative-looking literal never prints with a leading sign, so literals are primaries
    return true;
  default:
    return true;
  }
}

std::string number_text( const bitvec& v, bool is_signed )
{
  if ( is_signed && v.width() == 32 && !v.msb() )
    return v.to_dec();
  std::string s = std::to_string( v.width() ) + "'";
  if ( is_signed )
    s += "s";
  if ( v.width() <= 64 )
    s += "d" + v.to_dec();
  else
    s += "h" + v.to_hex();
  return s;
}

void print_expr( std::ostream& os, const expr& e );

void print_operand( std::ostream& os, const expr& e )
{
  if ( is_primary( e ) )
    print_expr( os, e );
  else
  {
    os << "(";
    print_expr( os, e );
    os << ")";
  }
}

void print_expr( std::ostream& os, const expr& e )
{
  switch ( e.kind )
  {
  case expr_kind::number:
    os << number_text( e.value, e.is_signed );
    break;
  case expr_kind::fill:
    os << ( e.value.bit( 0 ) ? "'1" : "'0" );
    break;
  case expr_kind::ident:
    os << e.name;
    break;
  case expr_kind::unary:
    os << e.op;
    print_operand( os, e.operands[0] );
    break;
  case expr_kind::binary:
    print_operand( os, e.operands[0] );
    os << " " << e.op << " ";
    print_operand( os, e.operands[1] );
    break;
  case expr_kind::ternary:
    print_operand( os, e.operands[0] );
    os << " ? ";
    print_operand( os, e.operands[1] );
    os << " : ";
    print_operand( os, e.operands[2] );
    break;
  case expr_kind::concat:
    os << "{";
    for ( size_t i = 0; i < e.operands.size(); ++i )
    {
      if ( i )
        os << ", ";
      print_expr( os, e.operands[i] );
    }
    os << "}";
    break;
  case expr_kind::replicate:
    os << "{";
    print_operand( os, e.operands[0] );
    os << "{";
    for ( size_t i = 1; i < e.operands.size(); ++i )
    {
      if ( i > 1 )
        os << ", ";
      print_expr( os, e.operands[i] );
    }
    os << "}}";
    break;
  case expr_kind::index:
    os << e.name << "[";
    print_expr( os, e.operands[0] );
    os << "]";
    break;
  case expr_kind::range_select:
    os << e.name << "[";
    print_expr( os, e.operands[0] );
    os << ":";
    print_expr( os, e.operands[1] );
    os << "]";
    break;
  case expr_kind::indexed_select:
    os << e.name << "[";
    print_expr( os, e.operands[0] );
    os << " " << e.op << " ";
    print_expr( os, e.operands[1] );
    os << "]";
    break;
  case expr_kind::call:
    os << e.name << "(";
    print_expr( os, e.operands[0] );
    os << ")";
    break;
  }
}

class printer
{
public:
  printer( const emit_options& opts, const module_decl& m ) : opts_( opts ), m_( m ) {}

  std::string run()
  {
    bool v2005 = opts_.lang == dialect::verilog2005;
    os_ << "module " << m_.name;
    if ( !m_.params.empty() )
    {
      os_ << " #(\n";
      for ( size_t i = 0; i < m_.params.size(); ++i )
      {
        os_ << "  ";
        param_text( m_.params[i] );
        os_ << ( i + 1 < m_.params.size() ? ",\n" : "\n" );
      }
      os_ << ")";
    }
    if ( !m_.ports.empty() )
    {
      os_ << " (\n";
      for ( size_t i = 0; i < m_.ports.size(); ++i )
      {
        const auto& p = m_.ports[i];
        os_ << "  " << ( p.dir == port_dir::input ? "input" : p.dir == port_dir::output ? "output" : "inout" );
        if ( v2005 )
          type_text( p.type, p.name, p.dir == port_dir::output ? "" : "wire" );
        else
          type_text( p.type, p.name, "" );
        os_ << " " << p.name << ( i + 1 < m_.ports.size() ? ",\n" : "\n" );
      }
      os_ << ")";
    }
    os_ << ";\n";
    for ( const auto& it : m_.items )
      item( it, 1 );
    os_ << "endmodule\n";
    return os_.str();
  }

private:
  const emit_options& opts_;
  const module_decl& m_;
  std::ostringstream os_;

  void indent( int level )
  {
    for ( int i = 0; i < level; ++i )
      os_ << "  ";
  }

  bool is_reg( const std::string& name ) const
  {
    return opts_.is_reg && opts_.is_reg( m_.name, name );
  }

  /* Prints " <keyword> [signed] [range]" with a leading space when anything is printed. */
  void type_text( const data_type& t, const std::string& name, const char* v2005_default )
  {
    if ( opts_.lang == dialect::verilog2005 )
    {
      const char* kw = is_reg( name ) ? "reg" : v2005_default;
      if ( t.keyword == type_keyword::int_ || t.keyword == type_keyword::integer || t.keyword == type_keyword::named )
        throw internal_error( "non-Verilog type survived elaboration for '" + name + "'" );
      if ( *kw || is_reg( name ) )
        os_ << " " << kw;
      else if ( opts_.lang == dialect::verilog2005 )
        os_ << " wire";
    }
    else
    {
      switch ( t.keyword )
      {
      case type_keyword::none: break;
      case type_keyword::logic: os_ << " logic"; break;
      case type_keyword::wire: os_ << " wire"; break;
      case type_keyword::reg: os_ << " reg"; break;
      case type_keyword::bit: os_ << " bit"; break;
      case type_keyword::int_: os_ << " int"; break;
      case type_keyword::integer: os_ << " integer"; break;
      case type_keyword::named: os_ << " " << t.type_name; break;
      }
    }
    if ( t.is_signed )
      os_ << " signed";
    if ( t.packed )
    {
      os_ << " [";
      print_expr( os_, t.packed->msb );
      os_ << ":";
      print_expr( os_, t.packed->lsb );
      os_ << "]";
    }
  }

  void param_text( const param_decl& p )
  {
    os_ << ( p.is_local ? "localparam" : "parameter" );
    if ( opts_.lang == dialect::verilog2005 )
    {
      if ( p.type.is_signed )
        os_ << " signed";
      if ( p.type.packed )
      {
        os_ << " [";
        print_expr( os_, p.type.packed->msb );
        os_ << ":";
        print_expr( os_, p.type.packed->lsb );
        os_ << "]";
      }
    }
    else
    {
      type_text( p.type, p.name, "" );
    }
    os_ << " " << p.name;
    if ( p.value )
    {
      os_ << " = ";
      print_expr( os_, *p.value );
    }
  }

  void bindings( const std::vector<named_binding>& bs )
  {
    for ( size_t i = 0; i < bs.size(); ++i )
    {
      if ( i )
        os_ << ", ";
      if ( !bs[i].name.empty() )
      {
        os_ << "." << bs[i].name << "(";
        if ( bs[i].value )
          print_expr( os_, *bs[i].value );
        os_ << ")";
      }
      else if ( bs[i].value )
        print_expr( os_, *bs[i].value );
    }
  }

  void items( const std::vector<module_item>& its, int level )
  {
    for ( const auto& it : its )
      item( it, level );
  }

  void item( const module_item& it, int level )
  {
    std::visit( [&]( const auto& n ) { node( n, level ); }, it.node );
  }

  void node( const net_decl& n, int level )
  {
    indent( level );
    if ( opts_.lang == dialect::verilog2005 )
    {
      os_ << ( is_reg( n.name ) ? "reg" : "wire" );
      data_type t = n.type;
      if ( t.is_signed )
        os_ << " signed";
      if ( t.packed )
      {
        os_ << " [";
        print_expr( os_, t.packed->msb );
        os_ << ":";
        print_expr( os_, t.packed->lsb );
        os_ << "]";
      }
    }
    else
    {
      std::ostringstream main;
      os_.swap( main );
      type_text( n.type, n.name, "" );
      std::string t = os_.str();
      os_.swap( main );
      os_ << ( t.empty() ? std::string( "logic" ) : t.substr( 1 ) );
    }
    os_ << " " << n.name;
    if ( n.init )
    {
      os_ << " = ";
      print_expr( os_, *n.init );
    }
    os_ << ";\n";
  }

  void node( const param_decl& p, int level )
  {
    indent( level );
    param_text( p );
    os_ << ";\n";
  }

  void node( const typedef_decl& t, int level )
  {
    indent( level );
    os_ << "typedef";
    if ( t.is_enum )
    {
      os_ << " enum";
      type_text( t.base, t.name, "" );
      os_ << " {";
      for ( size_t i = 0; i < t.members.size(); ++i )
      {
        os_ << ( i ? ", " : "" ) << t.members[i].name;
        if ( t.members[i].value )
        {
          os_ << " = ";
          print_expr( os_, *t.members[i].value );
        }
      }
      os_ << "}";
    }
    else
    {
      type_text( t.base, t.name, "" );
    }
    os_ << " " << t.name << ";\n";
  }

  void node( const genvar_decl& g, int level )
  {
    indent( level );
    os_ << "genvar ";
    for ( size_t i = 0; i < g.names.size(); ++i )
      os_ << ( i ? ", " : "" ) << g.names[i];
    os_ << ";\n";
  }

  void node( const continuous_assign& a, int level )
  {
    indent( level );
    os_ << "assign ";
    print_expr( os_, a.lhs );
    os_ << " = ";
    print_expr( os_, a.rhs );
    os_ << ";\n";
  }

  void node( const always_block& a, int level )
  {
    indent( level );
    bool v2005 = opts_.lang == dialect::verilog2005;
    switch ( a.kind )
    {
    case always_kind::comb:
      os_ << ( v2005 ? "always @*" : "always_comb" );
      break;
    case always_kind::star:
      os_ << "always @*";
      break;
    case always_kind::ff:
      os_ << ( v2005 ? "always" : "always_ff" ) << " @(" << ( a.posedge ? "posedge " : "negedge " ) << a.clock << ")";
      break;
    case always_kind::edge:
      os_ << "always @(" << ( a.posedge ? "posedge " : "negedge " ) << a.clock << ")";
      break;
    }
    body_stmt( a.body, level );
  }

  void node( const instance& i, int level )
  {
    indent( level );
    os_ << i.module;
    if ( !i.params.empty() )
    {
      os_ << " #(";
      bindings( i.params );
      os_ << ")";
    }
    os_ << " " << i.name << " (";
    bindings( i.ports );
    os_ << ");\n";
  }

  void node( const gen_for& g, int level )
  {
    indent( level );
    os_ << "for (" << ( g.declares_genvar ? "genvar " : "" ) << g.genvar << " = ";
    print_expr( os_, g.init );
    os_ << "; ";
    print_expr( os_, g.cond );
    os_ << "; " << g.genvar << " = ";
    print_expr( os_, g.step );
    os_ << ") begin";
    if ( !g.label.empty() )
      os_ << " : " << g.label;
    os_ << "\n";
    items( g.body, level + 1 );
    indent( level );
    os_ << "end\n";
  }

  void node( const gen_if& g, int level, bool continued = false )
  {
    if ( !continued )
      indent( level );
    os_ << "if (";
    print_expr( os_, g.cond );
    os_ << ") begin";
    if ( !g.then_label.empty() )
      os_ << " : " << g.then_label;
    os_ << "\n";
    items( g.then_items, level + 1 );
    indent( level );
    os_ << "end";
    if ( g.has_else )
    {
      if ( g.else_label.empty() && g.else_items.size() == 1 && std::holds_alternative<gen_if>( g.else_items[0].node ) )
      {
        os_ << " else ";
        node( std::get<gen_if>( g.else_items[0].node ), level, true );
        return;
      }
      os_ << " else begin";
      if ( !g.else_label.empty() )
        os_ << " : " << g.else_label;
      os_ << "\n";
      items( g.else_items, level + 1 );
      indent( level );
      os_ << "end";
    }
    os_ << "\n";
  }

  /* statements */

  // Prints a statement that follows a header on the same line (always, if, case item).
  void body_stmt( const stmt& s, int level )
  {
    if ( s.kind == stmt_kind::block )
    {
      os_ << " begin\n";
      for ( const auto& c : s.body )
        statement( c, level + 1 );
      indent( level );
      os_ << "end\n";
    }
    else
    {
      os_ << "\n";
      statement( s, level + 1 );
    }
  }

  void statement( const stmt& s, int level )
  {
    switch ( s.kind )
    {
    case stmt_kind::null:
      indent( level );
      os_ << ";\n";
      break;
    case stmt_kind::block:
      indent( level );
      os_ << "begin\n";
      for ( const auto& c : s.body )
        statement( c, level + 1 );
      indent( level );
      os_ << "end\n";
      break;
    case stmt_kind::blocking:
    case stmt_kind::nonblocking:
      indent( level );
      print_expr( os_, s.lhs );
      os_ << ( s.kind == stmt_kind::blocking ? " = " : " <= " );
      print_expr( os_, s.rhs );
      os_ << ";\n";
      break;
    case stmt_kind::if_:
    {
      indent( level );
      os_ << "if (";
      print_expr( os_, s.cond );
      os_ << ")";
      bool has_else = s.body.size() > 1;
      const stmt& then_s = s.body[0];
      if ( has_else && then_s.kind == stmt_kind::if_ )
      {
        // keep the else bound to this if
        os_ << " begin\n";
        statement( then_s, level + 1 );
        indent( level );
        os_ << "end\n";
      }
      else
      {
        body_stmt( then_s, level );
      }
      if ( has_else )
      {
        indent( level );
        os_ << "else";
        body_stmt( s.body[1], level );
      }
      break;
    }
    case stmt_kind::case_:
      indent( level );
      if ( !s.qualifier.empty() && opts_.lang == dialect::systemverilog )
        os_ << s.qualifier << " ";
      os_ << "case (";
      print_expr( os_, s.cond );
      os_ << ")\n";
      for ( const auto& ci : s.items )
      {
        indent( level + 1 );
        if ( ci.labels.empty() )
          os_ << "default:";
        else
        {
          for ( size_t i = 0; i < ci.labels.size(); ++i )
          {
            if ( i )
              os_ << ", ";
            print_expr( os_, ci.labels[i] );
          }
          os_ << ":";
        }
        body_stmt( ci.body[0], level + 1 );
      }
      indent( level );
      os_ << "endcase\n";
      break;
    }
  }
};

} // namespace

std::string emit_expr( const expr& e )
{
  std::ostringstream os;
  print_expr( os, e );
  return os.str();
}

std::string emit_module( const module_decl& m, const emit_options& opts )
{
  printer p( opts, m );
  return p.run();
}

std::string emit( const ast& design, const emit_options& opts )
{
  std::string out;
  for ( size_t i = 0; i < design.modules.size(); ++i )
  {
    if ( i )
      out += "\n";
    out += emit_module( design.modules[i], opts );
  }
  return out;
}

} // namespace svsyn
