#include "svsyn/bitvec.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace svsyn
{

bitvec::bitvec( uint32_t width, uint64_t value ) : width_( width ), words_( words_for( width ), 0 )
{
  if ( !words_.empty() )
    words_[0] = value;
  mask_top();
}

bitvec bitvec::ones( uint32_t width )
{
  bitvec r( width );
  std::fill( r.words_.begin(), r.words_.end(), ~uint64_t{ 0 } );
  r.mask_top();
  return r;
}

bitvec bitvec::from_bits( std::string_view binary )
{
  bitvec r( static_cast<uint32_t>( binary.size() ) );
  for ( uint32_t i = 0; i < binary.size(); ++i )
    r.set_bit( i, binary[binary.size() - 1 - i] == '1' );
  return r;
}

std::optional<bitvec> bitvec::parse( std::string_view digits, unsigned radix, uint32_t width )
{
  // accumulate with enough headroom, then truncate
  uint32_t bits_per_digit = radix == 16 ? 4 : radix == 8 ? 3 : radix == 2 ? 1 : 4;
  uint32_t work = std::max<uint32_t>( width, static_cast<uint32_t>( digits.size() ) * bits_per_digit + 4 );
  bitvec acc( work );
  bitvec r( work, radix );
  bool any = false;
  for ( char c : digits )
  {
    if ( c == '_' )
      continue;
    unsigned d;
    if ( c >= '0' && c <= '9' )
      d = c - '0';
    else if ( c >= 'a' && c <= 'f' )
      d = c - 'a' + 10;
    else if ( c >= 'A' && c <= 'F' )
      d = c - 'A' + 10;
    else
      return std::nullopt;
    if ( d >= radix )
      return std::nullopt;
    acc = acc * r + bitvec( work, d );
    any = true;
  }
  if ( !any )
    return std::nullopt;
  return acc.resized( width, false );
}

bool bitvec::bit( uint32_t i ) const
{
  if ( i >= width_ )
    return false;
  return ( words_[i / 64] >> ( i % 64 ) ) & 1u;
}

void bitvec::set_bit( uint32_t i, bool v )
{
  if ( i >= width_ )
    return;
  uint64_t m = uint64_t{ 1 } << ( i % 64 );
  if ( v )
    words_[i / 64] |= m;
  else
    words_[i / 64] &= ~m;
}

int64_t bitvec::to_i64() const
{
  uint64_t v = to_u64();
  if ( width_ > 0 && width_ < 64 && msb() )
    v |= ~uint64_t{ 0 } << width_;
  return static_cast<int64_t>( v );
}

bool bitvec::is_zero() const
{
  return std::all_of( words_.begin(), words_.end(), []( uint64_t w ) { return w == 0; } );
}

bool bitvec::is_ones() const
{
  return *this == ones( width_ );
}

bool bitvec::fits_u64() const
{
  for ( size_t i = 1; i < words_.size(); ++i )
    if ( words_[i] )
      return false;
  return true;
}

uint32_t bitvec::popcount() const
{
  uint32_t n = 0;
  for ( auto w : words_ )
    n += std::popcount( w );
  return n;
}

uint32_t bitvec::min_bits_unsigned() const
{
  for ( size_t i = words_.size(); i-- > 0; )
    if ( words_[i] )
      return static_cast<uint32_t>( i * 64 + 64 - std::countl_zero( words_[i] ) );
  return 0;
}

bitvec bitvec::resized( uint32_t width, bool sign_extend ) const
{
  bitvec r( width );
  size_t n = std::min( r.words_.size(), words_.size() );
  std::copy_n( words_.begin(), n, r.words_.begin() );
  if ( width > width_ && sign_extend && msb() )
  {
    for ( uint32_t i = width_; i < width; ++i )
      r.set_bit( i, true );
  }
  r.mask_top();
  return r;
}

bitvec bitvec::slice( int64_t lo, uint32_t width ) const
{
  bitvec r( width );
  if ( lo >= 0 && lo % 64 == 0 )
  {
    size_t off = static_cast<size_t>( lo / 64 );
    for ( size_t i = 0; i < r.words_.size() && off + i < words_.size(); ++i )
      r.words_[i] = words_[off + i];
    r.mask_top();
    return r;
  }
  for ( uint32_t i = 0; i < width; ++i )
  {
    int64_t src = lo + i;
    if ( src >= 0 && src < width_ )
      r.set_bit( i, bit( static_cast<uint32_t>( src ) ) );
  }
  return r;
}

void bitvec::set_slice( int64_t lo, const bitvec& v )
{
  for ( uint32_t i = 0; i < v.width(); ++i )
  {
    int64_t dst = lo + i;
    if ( dst >= 0 && dst < width_ )
      set_bit( static_cast<uint32_t>( dst ), v.bit( i ) );
  }
}

bitvec bitvec::concat( const bitvec& hi, const bitvec& lo )
{
  bitvec r = lo.resized( hi.width_ + lo.width_, false );
  r.set_slice( lo.width_, hi );
  return r;
}

bitvec bitvec::operator~() const
{
  bitvec r = *this;
  for ( auto& w : r.words_ )
    w = ~w;
  r.mask_top();
  return r;
}

bitvec bitvec::operator&( const bitvec& o ) const
{
  bitvec r = *this;
  for ( size_t i = 0; i < r.words_.size(); ++i )
    r.words_[i] &= o.words_[i];
  return r;
}

bitvec bitvec::operator|( const bitvec& o ) const
{
  bitvec r = *this;
  for ( size_t i = 0; i < r.words_.size(); ++i )
    r.words_[i] |= o.words_[i];
  return r;
}

bitvec bitvec::operator^( const bitvec& o ) const
{
  bitvec r = *this;
  for ( size_t i = 0; i < r.words_.size(); ++i )
    r.words_[i] ^= o.words_[i];
  return r;
}

bitvec bitvec::operator+( const bitvec& o ) const
{
  bitvec r( width_ );
  unsigned __int128 carry = 0;
  for ( size_t i = 0; i < r.words_.size(); ++i )
  {
    unsigned __int128 s = static_cast<unsigned __int128>( words_[i] ) + o.words_[i] + carry;
    r.words_[i] = static_cast<uint64_t>( s );
    carry = s >> 64;
  }
  r.mask_top();
  return r;
}

bitvec bitvec::negated() const
{
  return ~*this + bitvec( width_, 1 );
}

bitvec bitvec::operator-( const bitvec& o ) const
{
  return *this + o.negated();
}

bitvec bitvec::operator*( const bitvec& o ) const
{
  bitvec r( width_ );
  size_t n = r.words_.size();
  for ( size_t i = 0; i < n; ++i )
  {
    if ( !words_[i] )
      continue;
    unsigned __int128 carry = 0;
    for ( size_t j = 0; i + j < n; ++j )
    {
      unsigned __int128 p = static_cast<unsigned __int128>( words_[i] ) * o.words_[j] + r.words_[i + j] + carry;
      r.words_[i + j] = static_cast<uint64_t>( p );
      carry = p >> 64;
    }
  }
  r.mask_top();
  return r;
}

namespace
{

void udivrem( const bitvec& a, const bitvec& b, bitvec& q, bitvec& r )
{
  uint32_t w = a.width();
  q = bitvec( w );
  r = bitvec( w );
  if ( b.is_zero() )
    return;
  if ( a.fits_u64() && b.fits_u64() )
  {
    q = bitvec( w, a.to_u64() / b.to_u64() );
    r = bitvec( w, a.to_u64() % b.to_u64() );
    return;
  }
  for ( uint32_t i = w; i-- > 0; )
  {
    r = r.shl( 1 );
    r.set_bit( 0, a.bit( i ) );
    if ( !r.ult( b ) )
    {
      r = r - b;
      q.set_bit( i, true );
    }
  }
}

} // namespace

bitvec bitvec::udiv( const bitvec& o ) const
{
  bitvec q, r;
  udivrem( *this, o, q, r );
  return q;
}

bitvec bitvec::urem( const bitvec& o ) const
{
  bitvec q, r;
  udivrem( *this, o, q, r );
  return r;
}

bitvec bitvec::sdiv( const bitvec& o ) const
{
  bool na = msb(), nb = o.msb();
  bitvec q = ( na ? negated() : *this ).udiv( nb ? o.negated() : o );
  return ( na != nb ) ? q.negated() : q;
}

bitvec bitvec::srem( const bitvec& o ) const
{
  bool na = msb(), nb = o.msb();
  bitvec r = ( na ? negated() : *this ).urem( nb ? o.negated() : o );
  return na ? r.negated() : r;
}

bitvec bitvec::shl( uint64_t n ) const
{
  if ( n >= width_ )
    return bitvec( width_ );
  bitvec r( width_ );
  size_t ws = n / 64, bs = n % 64;
  for ( size_t i = r.words_.size(); i-- > ws; )
  {
    uint64_t v = words_[i - ws] << bs;
    if ( bs && i - ws > 0 )
      v |= words_[i - ws - 1] >> ( 64 - bs );
    r.words_[i] = v;
  }
  r.mask_top();
  return r;
}

bitvec bitvec::lshr( uint64_t n ) const
{
  if ( n >= width_ )
    return bitvec( width_ );
  bitvec r( width_ );
  size_t ws = n / 64, bs = n % 64;
  for ( size_t i = 0; i + ws < words_.size(); ++i )
  {
    uint64_t v = words_[i + ws] >> bs;
    if ( bs && i + ws + 1 < words_.size() )
      v |= words_[i + ws + 1] << ( 64 - bs );
    r.words_[i] = v;
  }
  return r;
}

bitvec bitvec::ashr( uint64_t n ) const
{
  if ( !msb() )
    return lshr( n );
  if ( n >= width_ )
    return ones( width_ );
  return lshr( n ) | ~ones( width_ ).lshr( n );
}

bool bitvec::ult( const bitvec& o ) const
{
  for ( size_t i = words_.size(); i-- > 0; )
    if ( words_[i] != o.words_[i] )
      return words_[i] < o.words_[i];
  return false;
}

bool bitvec::slt( const bitvec& o ) const
{
  bool na = msb(), nb = o.msb();
  if ( na != nb )
    return na;
  return ult( o );
}

std::string bitvec::to_hex() const
{
  static const char* digits = "0123456789abcdef";
  std::string s;
  uint32_t nd = std::max<uint32_t>( 1, ( width_ + 3 ) / 4 );
  for ( uint32_t d = nd; d-- > 0; )
  {
    unsigned v = 0;
    for ( uint32_t b = 0; b < 4; ++b )
      v |= static_cast<unsigned>( bit( d * 4 + b ) ) << b;
    s.push_back( digits[v] );
  }
  auto nz = s.find_first_not_of( '0' );
  return nz == std::string::npos ? "0" : s.substr( nz );
}

std::string bitvec::to_dec() const
{
  if ( fits_u64() )
    return std::to_string( to_u64() );
  std::string s;
  bitvec v = *this;
  bitvec ten( width_, 10 );
  while ( !v.is_zero() )
  {
    s.push_back( static_cast<char>( '0' + v.urem( ten ).to_u64() ) );
    v = v.udiv( ten );
  }
  std::reverse( s.begin(), s.end() );
  return s;
}

std::string bitvec::to_bin() const
{
  std::string s( width_, '0' );
  for ( uint32_t i = 0; i < width_; ++i )
    if ( bit( i ) )
      s[width_ - 1 - i] = '1';
  return s;
}

std::strong_ordering bitvec::operator<=>( const bitvec& o ) const
{
  if ( auto c = width_ <=> o.width_; c != 0 )
    return c;
  for ( size_t i = words_.size(); i-- > 0; )
    if ( words_[i] != o.words_[i] )
      return words_[i] <=> o.words_[i];
  return std::strong_ordering::equal;
}

void bitvec::mask_top()
{
  if ( width_ % 64 && !words_.empty() )
    words_.back() &= ( uint64_t{ 1 } << ( width_ % 64 ) ) - 1;
}

int64_t to_index( const bitvec& v, bool is_signed )
{
  constexpr int64_t big = std::numeric_limits<int64_t>::max() / 4;
  if ( is_signed && v.msb() )
  {
    bitvec m = v.negated();
    if ( !m.fits_u64() || m.to_u64() > static_cast<uint64_t>( big ) )
      return -big;
    return -static_cast<int64_t>( m.to_u64() );
  }
  if ( !v.fits_u64() || v.to_u64() > static_cast<uint64_t>( big ) )
    return big;
  return static_cast<int64_t>( v.to_u64() );
}

} // namespace svsyn
