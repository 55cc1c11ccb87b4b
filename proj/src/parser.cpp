#include "svsyn/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <set>

namespace svsyn
{

namespace
{

enum class tok_kind
{
  ident,
  system_ident,
  number,
  fill,
  op,
  eof
};

struct token
{
  tok_kind kind = tok_kind::eof;
  std::string text;
  bitvec value;
  bool is_signed = false;
  uint32_t line = 1;
  uint32_t column = 1;
};

struct parse_failure
{
  diagnostic diag;
};

const std::set<std::string, std::less<>> unsupported_keywords = {
    "interface", "endinterface", "class", "endclass", "package", "endpackage", "import", "export", "function", "endfunction",
    "task", "endtask", "struct", "union", "initial", "final", "assert", "assume", "cover", "property", "sequence",
    "covergroup", "program", "modport", "always_latch", "fork", "forever", "while", "repeat", "casez", "casex", "defparam",
    "specify", "primitive", "config", "virtual", "automatic", "static", "return", "do", "foreach", "wait", "force",
    "release", "deassign", "tri", "tri0", "tri1", "supply0", "supply1", "wand", "wor", "real", "shortreal", "string",
    "byte", "shortint", "longint", "time", "event", "chandle", "var", "const", "ref", "output_reg"};

class lexer
{
public:
  lexer( std::string_view text, const std::string& path ) : text_( text ), path_( path ) {}

  std::vector<token> run()
  {
    std::vector<token> out;
    for ( ;; )
    {
      skip_space();
      token t;
      t.line = line_;
      t.column = col_;
      if ( pos_ >= text_.size() )
      {
        out.push_back( t );
        return out;
      }
      char c = text_[pos_];
      if ( c == '`' )
      {
        directive( t );
        continue;
      }
      if ( std::isalpha( static_cast<unsigned char>( c ) ) || c == '_' )
      {
        t.kind = tok_kind::ident;
        t.text = take_while( []( char ch ) { return std::isalnum( static_cast<unsigned char>( ch ) ) || ch == '_' || ch == '$'; } );
      }
      else if ( c == '$' )
      {
        t.kind = tok_kind::system_ident;
        advance();
        t.text = "$" + take_while( []( char ch ) { return std::isalnum( static_cast<unsigned char>( ch ) ) || ch == '_'; } );
      }
      else if ( std::isdigit( static_cast<unsigned char>( c ) ) )
      {
        number( t );
      }
      else if ( c == '\'' )
      {
        based_or_fill( t, std::nullopt );
      }
      else if ( c == '"' )
      {
        fail( t, "unsupported construct: string literal", "unsupported" );
      }
      else
      {
        t.kind = tok_kind::op;
        t.text = operator_text();
      }
      out.push_back( std::move( t ) );
    }
  }

private:
  std::string_view text_;
  const std::string& path_;
  size_t pos_ = 0;
  uint32_t line_ = 1;
  uint32_t col_ = 1;

  [[noreturn]] void fail( const token& t, const std::string& msg, const char* code = "syntax" )
  {
    throw parse_failure{ diagnostic{ severity::error, path_, t.line, t.column, msg, code } };
  }

  void advance()
  {
    if ( text_[pos_] == '\n' )
    {
      ++line_;
      col_ = 1;
    }
    else
    {
      ++col_;
    }
    ++pos_;
  }

  template<class Pred>
  std::string take_while( Pred p )
  {
    std::string s;
    while ( pos_ < text_.size() && p( text_[pos_] ) )
    {
      s.push_back( text_[pos_] );
      advance();
    }
    return s;
  }

  void skip_space()
  {
    while ( pos_ < text_.size() )
    {
      char c = text_[pos_];
      if ( std::isspace( static_cast<unsigned char>( c ) ) )
        advance();
      else if ( c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/' )
        while ( pos_ < text_.size() && text_[pos_] != '\n' )
          advance();
      else if ( c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*' )
      {
        advance();
        advance();
        while ( pos_ + 1 < text_.size() && !( text_[pos_] == '*' && text_[pos_ + 1] == '/' ) )
          advance();
        if ( pos_ + 1 >= text_.size() )
        {
          token t;
          t.line = line_;
          t.column = col_;
          fail( t, "unterminated block comment" );
        }
        advance();
        advance();
      }
      else if ( c == '(' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*' && !( pos_ + 2 < text_.size() && text_[pos_ + 2] == ')' ) )
      {
        // attribute instance (* ... *): ignored
        while ( pos_ + 1 < text_.size() && !( text_[pos_] == '*' && text_[pos_ + 1] == ')' ) )
          advance();
        if ( pos_ + 1 < text_.size() )
        {
          advance();
          advance();
        }
      }
      else
        break;
    }
  }

  void directive( token& t )
  {
    advance();
    std::string name = take_while( []( char ch ) { return std::isalnum( static_cast<unsigned char>( ch ) ) || ch == '_'; } );
    if ( name == "timescale" || name == "default_nettype" || name == "resetall" || name == "celldefine" || name == "endcelldefine" )
    {
      while ( pos_ < text_.size() && text_[pos_] != '\n' )
        advance();
      return;
    }
    fail( t, "unsupported construct: compiler directive `" + name, "unsupported" );
  }

  void number( token& t )
  {
    std::string digits = take_while( []( char ch ) { return std::isdigit( static_cast<unsigned char>( ch ) ) || ch == '_'; } );
    size_t save_pos = pos_;
    uint32_t save_line = line_, save_col = col_;
    while ( pos_ < text_.size() && ( text_[pos_] == ' ' || text_[pos_] == '\t' ) )
      advance();
    if ( pos_ + 1 < text_.size() && text_[pos_] == '\'' && std::strchr( "sSbBoOdDhH", text_[pos_ + 1] ) )
    {
      auto w = bitvec::parse( digits, 10, 32 );
      if ( !w || w->is_zero() || w->to_u64() > ( 1u << 20 ) )
        fail( t, "invalid literal width '" + digits + "'" );
      based_or_fill( t, static_cast<uint32_t>( w->to_u64() ) );
      return;
    }
    pos_ = save_pos;
    line_ = save_line;
    col_ = save_col;
    // unsized decimal: signed, at least 32 bits
    auto probe = bitvec::parse( digits, 10, static_cast<uint32_t>( digits.size() * 4 + 4 ) );
    uint32_t w = std::max<uint32_t>( 32, probe->min_bits_unsigned() + 1 );
    t.kind = tok_kind::number;
    t.text = digits;
    t.value = probe->resized( w, false );
    t.is_signed = true;
  }

  void based_or_fill( token& t, std::optional<uint32_t> width )
  {
    advance(); // '
    if ( !width && pos_ < text_.size() && ( text_[pos_] == '0' || text_[pos_] == '1' ) )
    {
      t.kind = tok_kind::fill;
      t.value = bitvec( 1, text_[pos_] == '1' );
      t.text = std::string( "'" ) + text_[pos_];
      advance();
      return;
    }
    bool is_signed = false;
    if ( pos_ < text_.size() && ( text_[pos_] == 's' || text_[pos_] == 'S' ) )
    {
      is_signed = true;
      advance();
    }
    if ( pos_ >= text_.size() )
      fail( t, "malformed based literal" );
    char b = static_cast<char>( std::tolower( static_cast<unsigned char>( text_[pos_] ) ) );
    unsigned radix = b == 'b' ? 2 : b == 'o' ? 8 : b == 'd' ? 10 : b == 'h' ? 16 : 0;
    if ( !radix )
      fail( t, "malformed based literal" );
    advance();
    while ( pos_ < text_.size() && ( text_[pos_] == ' ' || text_[pos_] == '\t' ) )
      advance();
    std::string digits = take_while( []( char ch ) { return std::isxdigit( static_cast<unsigned char>( ch ) ) || ch == '_' || ch == 'x' || ch == 'X' || ch == 'z' || ch == 'Z' || ch == '?'; } );
    if ( digits.find_first_of( "xXzZ?" ) != std::string::npos )
      fail( t, "unsupported construct: x/z literal digits (two-valued subset)", "unsupported" );
    uint32_t w = width.value_or( 32 );
    auto v = bitvec::parse( digits, radix, w );
    if ( !v )
      fail( t, "malformed based literal digits '" + digits + "'" );
    t.kind = tok_kind::number;
    t.text = digits;
    t.value = *v;
    t.is_signed = is_signed;
  }

  std::string operator_text()
  {
    static const char* ops[] = { "<<<=", ">>>=", "<<<", ">>>", "===", "!==", "<<=", ">>=", "+:", "-:", "**", "<=", ">=", "==", "!=", "&&", "||", "<<", ">>", "~&", "~|", "~^", "^~", "++", "--", "+=", "-=", "::", "@*" };
    for ( const char* op : ops )
    {
      std::string_view sv( op );
      if ( text_.substr( pos_, sv.size() ) == sv )
      {
        for ( size_t i = 0; i < sv.size(); ++i )
          advance();
        return std::string( sv );
      }
    }
    std::string s( 1, text_[pos_] );
    advance();
    return s;
  }
};

class parser
{
public:
  parser( std::vector<token> toks, const std::string& path ) : toks_( std::move( toks ) ), path_( path ) {}

  void parse_file( ast& out )
  {
    while ( !at_eof() )
    {
      if ( peek_is( "module" ) )
        out.modules.push_back( parse_module() );
      else if ( peek_is( "macromodule" ) )
        fail( peek(), "unsupported construct: macromodule", "unsupported" );
      else
        reject_or_fail( "expected 'module'" );
    }
  }

private:
  std::vector<token> toks_;
  const std::string& path_;
  size_t i_ = 0;
  std::set<std::string> typedefs_;

  const token& peek( size_t k = 0 ) const { return toks_[std::min( i_ + k, toks_.size() - 1 )]; }
  bool at_eof() const { return peek().kind == tok_kind::eof; }
  bool peek_is( std::string_view s, size_t k = 0 ) const
  {
    const auto& t = peek( k );
    return ( t.kind == tok_kind::ident || t.kind == tok_kind::op ) && t.text == s;
  }
  token take() { return toks_[std::min( i_++, toks_.size() - 1 )]; }

  source_loc loc_of( const token& t ) const { return source_loc{ path_, t.line, t.column }; }

  [[noreturn]] void fail( const token& t, const std::string& msg, const char* code = "syntax" ) const
  {
    throw parse_failure{ diagnostic{ severity::error, path_, t.line, t.column, msg, code } };
  }

  [[noreturn]] void reject_or_fail( const std::string& msg ) const
  {
    const auto& t = peek();
    if ( t.kind == tok_kind::ident && unsupported_keywords.count( t.text ) )
      fail( t, "unsupported construct: " + t.text, "unsupported" );
    if ( t.kind == tok_kind::eof )
      fail( t, msg + ", found end of file" );
    fail( t, msg + ", found '" + t.text + "'" );
  }

  bool accept( std::string_view s )
  {
    if ( peek_is( s ) )
    {
      ++i_;
      return true;
    }
    return false;
  }

  token expect( std::string_view s )
  {
    if ( !peek_is( s ) )
      reject_or_fail( "expected '" + std::string( s ) + "'" );
    return take();
  }

  static bool is_keyword( std::string_view s )
  {
    static const std::set<std::string, std::less<>> kws = {
        "module", "endmodule", "input", "output", "inout", "logic", "wire", "reg", "bit", "int", "integer", "signed",
        "unsigned", "parameter", "localparam", "assign", "always", "always_comb", "always_ff", "begin", "end", "if", "else",
        "case", "endcase", "default", "for", "genvar", "generate", "endgenerate", "typedef", "enum", "posedge", "negedge",
        "or", "unique", "priority" };
    return kws.count( s ) > 0 || unsupported_keywords.count( s ) > 0;
  }

  std::string expect_ident()
  {
    const auto& t = peek();
    if ( t.kind != tok_kind::ident || is_keyword( t.text ) )
      reject_or_fail( "expected identifier" );
    return take().text;
  }

  /* module structure */

  module_decl parse_module()
  {
    module_decl m;
    m.loc = loc_of( expect( "module" ) );
    m.name = expect_ident();
    typedefs_.clear();
    if ( accept( "#" ) )
    {
      expect( "(" );
      if ( !peek_is( ")" ) )
      {
        param_decl proto;
        do
        {
          auto p = parse_header_param( proto );
          proto = p;
          m.params.push_back( std::move( p ) );
        } while ( accept( "," ) );
      }
      expect( ")" );
    }
    if ( accept( "(" ) )
    {
      if ( !peek_is( ")" ) )
      {
        port_decl proto;
        bool first = true;
        do
        {
          auto p = parse_port( proto, first );
          first = false;
          proto = p;
          m.ports.push_back( std::move( p ) );
        } while ( accept( "," ) );
      }
      expect( ")" );
    }
    expect( ";" );
    while ( !peek_is( "endmodule" ) )
    {
      if ( at_eof() )
        fail( peek(), "missing 'endmodule' for module '" + m.name + "'" );
      parse_item( m.items );
    }
    expect( "endmodule" );
    if ( accept( ":" ) )
      expect_ident();
    return m;
  }

  param_decl parse_header_param( const param_decl& proto )
  {
    param_decl p;
    p.loc = loc_of( peek() );
    if ( accept( "parameter" ) )
    {
      p.is_local = false;
      p.type = parse_optional_type();
    }
    else if ( accept( "localparam" ) )
    {
      p.is_local = true;
      p.type = parse_optional_type();
    }
    else if ( starts_type() )
    {
      p.is_local = proto.is_local;
      p.type = parse_optional_type();
    }
    else
    {
      p.is_local = proto.is_local;
      p.type = proto.type;
    }
    p.name = expect_ident();
    if ( accept( "=" ) )
      p.value = parse_expr();
    else
      fail( peek(), "parameter '" + p.name + "' needs a default value" );
    return p;
  }

  bool starts_type() const
  {
    const auto& t = peek();
    if ( t.kind != tok_kind::ident )
      return false;
    static const std::set<std::string, std::less<>> tk = { "logic", "wire", "reg", "bit", "int", "integer", "signed", "unsigned" };
    if ( tk.count( t.text ) )
      return true;
    if ( peek_is( "[" ) )
      return true;
    return typedefs_.count( t.text ) > 0;
  }

  data_type parse_optional_type()
  {
    data_type d;
    const auto& t = peek();
    if ( t.kind == tok_kind::ident )
    {
      if ( t.text == "logic" ) d.keyword = type_keyword::logic;
      else if ( t.text == "wire" ) d.keyword = type_keyword::wire;
      else if ( t.text == "reg" ) d.keyword = type_keyword::reg;
      else if ( t.text == "bit" ) d.keyword = type_keyword::bit;
      else if ( t.text == "int" ) d.keyword = type_keyword::int_;
      else if ( t.text == "integer" ) d.keyword = type_keyword::integer;
      else if ( typedefs_.count( t.text ) && peek( 1 ).kind == tok_kind::ident )
      {
        d.keyword = type_keyword::named;
        d.type_name = t.text;
      }
      else if ( unsupported_keywords.count( t.text ) )
        fail( t, "unsupported construct: " + t.text, "unsupported" );
      if ( d.keyword != type_keyword::none )
        ++i_;
    }
    if ( d.keyword == type_keyword::wire && ( peek_is( "logic" ) || peek_is( "reg" ) ) )
      ++i_;
    if ( accept( "signed" ) )
      d.is_signed = true;
    else
      accept( "unsigned" );
    if ( peek_is( "[" ) )
    {
      ++i_;
      range r;
      r.msb = parse_expr();
      expect( ":" );
      r.lsb = parse_expr();
      expect( "]" );
      d.packed = std::move( r );
      if ( peek_is( "[" ) )
        fail( peek(), "unsupported construct: multi-dimensional packed array", "unsupported" );
    }
    return d;
  }

  port_decl parse_port( const port_decl& proto, bool first )
  {
    port_decl p;
    p.loc = loc_of( peek() );
    bool has_dir = true;
    if ( accept( "input" ) ) p.dir = port_dir::input;
    else if ( accept( "output" ) ) p.dir = port_dir::output;
    else if ( accept( "inout" ) )
      fail( toks_[i_ - 1], "unsupported construct: inout port", "unsupported" );
    else
      has_dir = false;
    if ( !has_dir )
    {
      if ( first )
        fail( peek(), "unsupported construct: non-ANSI port list", "unsupported" );
      if ( starts_type() )
      {
        p.dir = proto.dir;
        p.type = parse_optional_type();
      }
      else
      {
        p.dir = proto.dir;
        p.type = proto.type;
      }
    }
    else
    {
      p.type = parse_optional_type();
    }
    p.name = expect_ident();
    if ( peek_is( "[" ) )
      fail( peek(), "unsupported construct: unpacked array port", "unsupported" );
    return p;
  }

  void parse_item( std::vector<module_item>& items )
  {
    const auto& t = peek();
    if ( t.kind != tok_kind::ident )
      reject_or_fail( "expected module item" );
    auto loc = loc_of( t );
    const std::string& kw = t.text;
    if ( kw == "generate" || kw == "endgenerate" )
    {
      ++i_;
      return;
    }
    if ( kw == "parameter" || kw == "localparam" )
    {
      ++i_;
      param_decl proto;
      proto.is_local = kw == "localparam";
      proto.type = parse_optional_type();
      do
      {
        param_decl p = proto;
        p.loc = loc_of( peek() );
        p.name = expect_ident();
        expect( "=" );
        p.value = parse_expr();
        items.push_back( { std::move( p ) } );
      } while ( accept( "," ) );
      expect( ";" );
      return;
    }
    if ( kw == "typedef" )
    {
      items.push_back( { parse_typedef() } );
      return;
    }
    if ( kw == "genvar" )
    {
      ++i_;
      genvar_decl g;
      g.loc = loc;
      do
        g.names.push_back( expect_ident() );
      while ( accept( "," ) );
      expect( ";" );
      items.push_back( { std::move( g ) } );
      return;
    }
    if ( kw == "assign" )
    {
      ++i_;
      do
      {
        continuous_assign a;
        a.loc = loc_of( peek() );
        a.lhs = parse_lvalue();
        expect( "=" );
        a.rhs = parse_expr();
        items.push_back( { std::move( a ) } );
      } while ( accept( "," ) );
      expect( ";" );
      return;
    }
    if ( kw == "always_comb" || kw == "always_ff" || kw == "always" )
    {
      items.push_back( { parse_always() } );
      return;
    }
    if ( kw == "for" )
    {
      items.push_back( { parse_gen_for() } );
      return;
    }
    if ( kw == "if" )
    {
      items.push_back( { parse_gen_if() } );
      return;
    }
    if ( kw == "begin" )
      fail( t, "unsupported construct: bare generate block", "unsupported" );
    if ( kw == "case" )
      fail( t, "unsupported construct: generate case", "unsupported" );
    if ( kw == "logic" || kw == "wire" || kw == "reg" || kw == "bit" || kw == "int" || kw == "integer" ||
         ( typedefs_.count( kw ) && peek( 1 ).kind == tok_kind::ident && !peek_is( "(", 2 ) ) )
    {
      parse_net_decls( items );
      return;
    }
    if ( unsupported_keywords.count( kw ) )
      fail( t, "unsupported construct: " + kw, "unsupported" );
    if ( is_keyword( kw ) )
      fail( t, "unexpected '" + kw + "'" );
    // module instance
    items.push_back( { parse_instance() } );
  }

  void parse_net_decls( std::vector<module_item>& items )
  {
    data_type type = parse_optional_type();
    do
    {
      net_decl n;
      n.loc = loc_of( peek() );
      n.type = type;
      n.name = expect_ident();
      if ( peek_is( "[" ) )
        fail( peek(), "unsupported construct: unpacked array", "unsupported" );
      if ( accept( "=" ) )
        n.init = parse_expr();
      items.push_back( { std::move( n ) } );
    } while ( accept( "," ) );
    expect( ";" );
  }

  typedef_decl parse_typedef()
  {
    typedef_decl td;
    td.loc = loc_of( expect( "typedef" ) );
    if ( accept( "enum" ) )
    {
      td.is_enum = true;
      if ( !peek_is( "{" ) )
        td.base = parse_optional_type();
      expect( "{" );
      do
      {
        enum_member m;
        m.name = expect_ident();
        if ( accept( "=" ) )
          m.value = parse_expr();
        td.members.push_back( std::move( m ) );
      } while ( accept( "," ) );
      expect( "}" );
    }
    else
    {
      if ( peek_is( "struct" ) || peek_is( "union" ) )
        fail( peek(), "unsupported construct: " + peek().text, "unsupported" );
      td.base = parse_optional_type();
      if ( td.base.keyword == type_keyword::none && !td.base.packed )
        reject_or_fail( "expected type in typedef" );
    }
    td.name = expect_ident();
    expect( ";" );
    typedefs_.insert( td.name );
    return td;
  }

  always_block parse_always()
  {
    always_block a;
    auto t = take();
    a.loc = loc_of( t );
    if ( t.text == "always_comb" )
    {
      a.kind = always_kind::comb;
    }
    else
    {
      a.kind = t.text == "always_ff" ? always_kind::ff : always_kind::edge;
      if ( accept( "@*" ) )
      {
        if ( a.kind == always_kind::ff )
          fail( t, "always_ff requires a clock edge" );
        a.kind = always_kind::star;
      }
      else
      {
        expect( "@" );
        if ( accept( "*" ) )
        {
          if ( a.kind == always_kind::ff )
            fail( t, "always_ff requires a clock edge" );
          a.kind = always_kind::star;
        }
        else
        {
          expect( "(" );
          if ( accept( "*" ) )
          {
            if ( a.kind == always_kind::ff )
              fail( t, "always_ff requires a clock edge" );
            a.kind = always_kind::star;
          }
          else if ( accept( "posedge" ) || ( peek_is( "negedge" ) && ( a.posedge = false, accept( "negedge" ) ) ) )
          {
            a.clock = expect_ident();
            if ( peek_is( "or" ) || peek_is( "," ) )
              fail( peek(), "unsupported construct: multi-edge sensitivity (single clock only)", "unsupported" );
          }
          else
          {
            fail( peek(), "unsupported construct: explicit sensitivity list", "unsupported" );
          }
          expect( ")" );
        }
      }
    }
    a.body = parse_stmt();
    return a;
  }

  instance parse_instance()
  {
    instance inst;
    inst.loc = loc_of( peek() );
    inst.module = expect_ident();
    if ( accept( "#" ) )
    {
      expect( "(" );
      inst.params = parse_bindings();
      expect( ")" );
    }
    inst.name = expect_ident();
    if ( peek_is( "[" ) )
      fail( peek(), "unsupported construct: instance array", "unsupported" );
    expect( "(" );
    inst.ports = parse_bindings();
    expect( ")" );
    expect( ";" );
    return inst;
  }

  std::vector<named_binding> parse_bindings()
  {
    std::vector<named_binding> out;
    if ( peek_is( ")" ) )
      return out;
    do
    {
      named_binding b;
      if ( accept( "." ) )
      {
        if ( peek_is( "*" ) )
          fail( peek(), "unsupported construct: wildcard port connection", "unsupported" );
        b.name = expect_ident();
        expect( "(" );
        if ( !peek_is( ")" ) )
          b.value = parse_expr();
        expect( ")" );
      }
      else
      {
        b.value = parse_expr();
      }
      out.push_back( std::move( b ) );
    } while ( accept( "," ) );
    return out;
  }

  std::string parse_block_label()
  {
    if ( accept( ":" ) )
      return expect_ident();
    return {};
  }

  void parse_gen_body( std::vector<module_item>& body, std::string& label )
  {
    if ( accept( "begin" ) )
    {
      label = parse_block_label();
      while ( !peek_is( "end" ) )
      {
        if ( at_eof() )
          fail( peek(), "missing 'end' in generate block" );
        parse_item( body );
      }
      expect( "end" );
      if ( accept( ":" ) )
        expect_ident();
    }
    else
    {
      parse_item( body );
    }
  }

  gen_for parse_gen_for()
  {
    gen_for g;
    g.loc = loc_of( expect( "for" ) );
    expect( "(" );
    g.declares_genvar = accept( "genvar" );
    g.genvar = expect_ident();
    expect( "=" );
    g.init = parse_expr();
    expect( ";" );
    g.cond = parse_expr();
    expect( ";" );
    auto var_tok = peek();
    auto var = expect_ident();
    if ( var != g.genvar )
      fail( var_tok, "generate loop step must update '" + g.genvar + "'" );
    if ( accept( "++" ) )
      g.step = expr::binary( "+", expr::ident( var ), expr::integer( 1 ) );
    else if ( accept( "--" ) )
      g.step = expr::binary( "-", expr::ident( var ), expr::integer( 1 ) );
    else if ( accept( "+=" ) )
      g.step = expr::binary( "+", expr::ident( var ), parse_expr() );
    else if ( accept( "-=" ) )
      g.step = expr::binary( "-", expr::ident( var ), parse_expr() );
    else
    {
      expect( "=" );
      g.step = parse_expr();
    }
    expect( ")" );
    parse_gen_body( g.body, g.label );
    return g;
  }

  gen_if parse_gen_if()
  {
    gen_if g;
    g.loc = loc_of( expect( "if" ) );
    expect( "(" );
    g.cond = parse_expr();
    expect( ")" );
    parse_gen_body( g.then_items, g.then_label );
    if ( accept( "else" ) )
    {
      g.has_else = true;
      if ( peek_is( "if" ) )
        g.else_items.push_back( { parse_gen_if() } );
      else
        parse_gen_body( g.else_items, g.else_label );
    }
    return g;
  }

  /* statements */

  stmt parse_stmt()
  {
    stmt s;
    const auto& t = peek();
    s.loc = loc_of( t );
    if ( accept( ";" ) )
    {
      s.kind = stmt_kind::null;
      return s;
    }
    if ( accept( "begin" ) )
    {
      s.kind = stmt_kind::block;
      parse_block_label();
      while ( !peek_is( "end" ) )
      {
        if ( at_eof() )
          fail( peek(), "missing 'end'" );
        s.body.push_back( parse_stmt() );
      }
      expect( "end" );
      if ( accept( ":" ) )
        expect_ident();
      if ( s.body.size() == 1 )
        return std::move( s.body.front() );
      return s;
    }
    if ( accept( "if" ) )
    {
      s.kind = stmt_kind::if_;
      expect( "(" );
      s.cond = parse_expr();
      expect( ")" );
      s.body.push_back( parse_stmt() );
      if ( accept( "else" ) )
        s.body.push_back( parse_stmt() );
      return s;
    }
    if ( peek_is( "unique" ) || peek_is( "priority" ) )
    {
      s.qualifier = take().text;
      if ( !peek_is( "case" ) )
        fail( peek(), "unsupported construct: " + s.qualifier + " if", "unsupported" );
    }
    if ( accept( "case" ) )
    {
      s.kind = stmt_kind::case_;
      expect( "(" );
      s.cond = parse_expr();
      expect( ")" );
      bool seen_default = false;
      while ( !peek_is( "endcase" ) )
      {
        if ( at_eof() )
          fail( peek(), "missing 'endcase'" );
        case_item ci;
        if ( accept( "default" ) )
        {
          if ( seen_default )
            fail( toks_[i_ - 1], "duplicate default in case" );
          seen_default = true;
          accept( ":" );
        }
        else
        {
          do
            ci.labels.push_back( parse_expr() );
          while ( accept( "," ) );
          expect( ":" );
        }
        ci.body.push_back( parse_stmt() );
        s.items.push_back( std::move( ci ) );
      }
      expect( "endcase" );
      return s;
    }
    if ( peek_is( "for" ) )
      fail( t, "unsupported construct: procedural for loop", "unsupported" );
    if ( t.kind == tok_kind::ident && unsupported_keywords.count( t.text ) )
      fail( t, "unsupported construct: " + t.text, "unsupported" );
    s.lhs = parse_lvalue();
    if ( accept( "=" ) )
      s.kind = stmt_kind::blocking;
    else if ( accept( "<=" ) )
      s.kind = stmt_kind::nonblocking;
    else
      reject_or_fail( "expected '=' or '<='" );
    s.rhs = parse_expr();
    expect( ";" );
    return s;
  }

  expr parse_lvalue()
  {
    const auto& t = peek();
    if ( peek_is( "{" ) )
    {
      ++i_;
      expr e;
      e.kind = expr_kind::concat;
      e.loc = loc_of( t );
      do
        e.operands.push_back( parse_lvalue() );
      while ( accept( "," ) );
      expect( "}" );
      return e;
    }
    auto loc = loc_of( t );
    auto name = expect_ident();
    return parse_selects( expr::ident( name, loc ) );
  }

  expr parse_selects( expr base )
  {
    if ( !peek_is( "[" ) )
      return base;
    auto lb = take();
    expr a = parse_expr();
    expr e;
    e.name = base.name;
    e.loc = base.loc;
    if ( accept( ":" ) )
    {
      e.kind = expr_kind::range_select;
      e.operands.push_back( std::move( a ) );
      e.operands.push_back( parse_expr() );
    }
    else if ( peek_is( "+:" ) || peek_is( "-:" ) )
    {
      e.kind = expr_kind::indexed_select;
      e.op = take().text;
      e.operands.push_back( std::move( a ) );
      e.operands.push_back( parse_expr() );
    }
    else
    {
      e.kind = expr_kind::index;
      e.operands.push_back( std::move( a ) );
    }
    expect( "]" );
    if ( peek_is( "[" ) )
      fail( peek(), "unsupported construct: select of a select", "unsupported" );
    (void)lb;
    return e;
  }

  /* expressions: precedence climbing */

  static int binary_prec( const std::string& op )
  {
    static const std::map<std::string, int> prec = {
        { "||", 1 }, { "&&", 2 }, { "|", 3 }, { "^", 4 }, { "~^", 4 }, { "^~", 4 }, { "&", 5 }, { "==", 6 }, { "!=", 6 },
        { "===", 6 }, { "!==", 6 }, { "<", 7 }, { "<=", 7 }, { ">", 7 }, { ">=", 7 }, { "<<", 8 }, { ">>", 8 },
        { "<<<", 8 }, { ">>>", 8 }, { "+", 9 }, { "-", 9 }, { "*", 10 }, { "/", 10 }, { "%", 10 }, { "**", 11 } };
    auto it = prec.find( op );
    return it == prec.end() ? -1 : it->second;
  }

public:
  expr parse_expr()
  {
    expr c = parse_binary( 1 );
    if ( peek_is( "?" ) )
    {
      auto t = take();
      expr e;
      e.kind = expr_kind::ternary;
      e.loc = loc_of( t );
      e.operands.push_back( std::move( c ) );
      e.operands.push_back( parse_expr() );
      expect( ":" );
      e.operands.push_back( parse_expr() );
      return e;
    }
    return c;
  }

private:
  expr parse_binary( int min_prec )
  {
    expr lhs = parse_unary();
    for ( ;; )
    {
      const auto& t = peek();
      if ( t.kind != tok_kind::op )
        break;
      int p = binary_prec( t.text );
      if ( p < min_prec )
        break;
      auto op = take();
      // ** is left-associative in SV
      expr rhs = parse_binary( p + 1 );
      std::string name = op.text == "^~" ? "~^" : op.text;
      lhs = expr::binary( name, std::move( lhs ), std::move( rhs ), loc_of( op ) );
    }
    return lhs;
  }

  expr parse_unary()
  {
    const auto& t = peek();
    if ( t.kind == tok_kind::op )
    {
      static const std::set<std::string, std::less<>> unops = { "+", "-", "!", "~", "&", "|", "^", "~&", "~|", "~^", "^~" };
      if ( unops.count( t.text ) )
      {
        auto op = take();
        std::string name = op.text == "^~" ? "~^" : op.text;
        return expr::unary( name, parse_unary(), loc_of( op ) );
      }
    }
    return parse_primary();
  }

  expr parse_primary()
  {
    const auto& t = peek();
    auto loc = loc_of( t );
    switch ( t.kind )
    {
    case tok_kind::number:
    {
      auto tk = take();
      return expr::number( tk.value, tk.is_signed, loc );
    }
    case tok_kind::fill:
    {
      auto tk = take();
      expr e;
      e.kind = expr_kind::fill;
      e.value = tk.value;
      e.loc = loc;
      return e;
    }
    case tok_kind::system_ident:
    {
      auto tk = take();
      if ( tk.text != "$clog2" && tk.text != "$signed" && tk.text != "$unsigned" )
        fail( tk, "unsupported construct: system function " + tk.text, "unsupported" );
      expr e;
      e.kind = expr_kind::call;
      e.name = tk.text;
      e.loc = loc;
      expect( "(" );
      e.operands.push_back( parse_expr() );
      expect( ")" );
      return e;
    }
    case tok_kind::ident:
    {
      if ( is_keyword( t.text ) )
        reject_or_fail( "expected expression" );
      auto tk = take();
      if ( peek_is( "(" ) )
        fail( tk, "unsupported construct: function call '" + tk.text + "'", "unsupported" );
      if ( peek_is( "::" ) )
        fail( tk, "unsupported construct: package scope", "unsupported" );
      if ( peek_is( "." ) )
        fail( tk, "unsupported construct: hierarchical reference", "unsupported" );
      return parse_selects( expr::ident( tk.text, loc ) );
    }
    case tok_kind::op:
      if ( accept( "(" ) )
      {
        expr e = parse_expr();
        expect( ")" );
        return e;
      }
      if ( accept( "{" ) )
      {
        expr first = parse_expr();
        if ( peek_is( "{" ) )
        {
          ++i_;
          expr e;
          e.kind = expr_kind::replicate;
          e.loc = loc;
          e.operands.push_back( std::move( first ) );
          do
            e.operands.push_back( parse_expr() );
          while ( accept( "," ) );
          expect( "}" );
          expect( "}" );
          return e;
        }
        expr e;
        e.kind = expr_kind::concat;
        e.loc = loc;
        e.operands.push_back( std::move( first ) );
        while ( accept( "," ) )
          e.operands.push_back( parse_expr() );
        expect( "}" );
        return e;
      }
      if ( t.text == "'" && peek( 1 ).kind == tok_kind::op && peek( 1 ).text == "{" )
        fail( t, "unsupported construct: assignment pattern", "unsupported" );
      break;
    default:
      break;
    }
    reject_or_fail( "expected expression" );
  }
};

} // namespace

expr expr::number( bitvec v, bool is_signed, source_loc loc )
{
  expr e;
  e.kind = expr_kind::number;
  e.value = std::move( v );
  e.is_signed = is_signed;
  e.loc = std::move( loc );
  return e;
}

expr expr::integer( int64_t v )
{
  return number( bitvec( 32, static_cast<uint64_t>( v ) ), true );
}

expr expr::ident( std::string name, source_loc loc )
{
  expr e;
  e.kind = expr_kind::ident;
  e.name = std::move( name );
  e.loc = std::move( loc );
  return e;
}

expr expr::unary( std::string op, expr a, source_loc loc )
{
  expr e;
  e.kind = expr_kind::unary;
  e.op = std::move( op );
  e.operands.push_back( std::move( a ) );
  e.loc = std::move( loc );
  return e;
}

expr expr::binary( std::string op, expr a, expr b, source_loc loc )
{
  expr e;
  e.kind = expr_kind::binary;
  e.op = std::move( op );
  e.operands.push_back( std::move( a ) );
  e.operands.push_back( std::move( b ) );
  e.loc = std::move( loc );
  return e;
}

const module_decl* ast::find( std::string_view name ) const
{
  for ( const auto& m : modules )
    if ( m.name == name )
      return &m;
  return nullptr;
}

bool parse_result::ok() const
{
  return std::none_of( diags.begin(), diags.end(), []( const diagnostic& d ) { return d.level == severity::error; } );
}

parse_result parse_text( std::string_view text, const std::string& path )
{
  parse_result r;
  try
  {
    lexer lx( text, path );
    parser p( lx.run(), path );
    p.parse_file( r.design );
  }
  catch ( const parse_failure& f )
  {
    r.diags.push_back( f.diag );
  }
  return r;
}

namespace
{

void collect_instances( const std::vector<module_item>& items, std::vector<const instance*>& out )
{
  for ( const auto& it : items )
  {
    if ( auto* i = std::get_if<instance>( &it.node ) )
      out.push_back( i );
    else if ( auto* f = std::get_if<gen_for>( &it.node ) )
      collect_instances( f->body, out );
    else if ( auto* g = std::get_if<gen_if>( &it.node ) )
    {
      collect_instances( g->then_items, out );
      collect_instances( g->else_items, out );
    }
  }
}

} // namespace

std::vector<const instance*> instances_of( const module_decl& m )
{
  std::vector<const instance*> out;
  collect_instances( m.items, out );
  return out;
}

parse_result parse( const source_set& sources )
{
  parse_result r;
  std::map<std::string, source_loc> seen;
  std::set<std::string> paths;
  for ( const auto& f : sources.files )
  {
    if ( !paths.insert( f.path ).second )
    {
      r.diags.push_back( { severity::error, f.path, 1, 1, "file listed twice in source set", "duplicate-file" } );
      continue;
    }
    auto one = parse_text( f.text, f.path );
    r.diags.insert( r.diags.end(), one.diags.begin(), one.diags.end() );
    for ( auto& m : one.design.modules )
    {
      auto [it, fresh] = seen.emplace( m.name, m.loc );
      if ( !fresh )
      {
        r.diags.push_back( { severity::error, m.loc.file, m.loc.line, m.loc.column,
                             "duplicate definition of module '" + m.name + "' (first defined at " + it->second.file + ":" +
                                 std::to_string( it->second.line ) + ")",
                             "duplicate-module" } );
        continue;
      }
      r.design.modules.push_back( std::move( m ) );
    }
  }
  if ( !r.ok() )
    return r;
  for ( const auto& m : r.design.modules )
    for ( const auto* inst : instances_of( m ) )
      if ( !seen.count( inst->module ) )
        r.diags.push_back( { severity::error, inst->loc.file, inst->loc.line, inst->loc.column,
                             "instance '" + inst->name + "' references undeclared module '" + inst->module + "'",
                             "unknown-module" } );
  if ( !sources.top.empty() && !seen.count( sources.top ) && r.ok() )
    r.diags.push_back( { severity::error, sources.files.empty() ? "<manifest>" : sources.files.front().path, 1, 1,
                         "top module '" + sources.top + "' is not defined", "unknown-top" } );
  return r;
}

} // namespace svsyn
