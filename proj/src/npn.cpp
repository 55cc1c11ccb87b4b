#include "svsyn/diagnostic.hpp"
#include "svsyn/lms.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_set>

namespace svsyn
{

namespace
{

uint64_t flip_var( uint64_t t, uint32_t i, uint64_t mask )
{
  const uint64_t m = var_pattern( i );
  const uint32_t s = 1u << i;
  return ( ( ( t & m ) >> s ) | ( ( t & ~m ) << s ) ) & mask;
}

uint64_t swap_adjacent( uint64_t t, uint32_t i, uint64_t mask )
{
  const uint64_t a = var_pattern( i ) & ~var_pattern( i + 1 );
  const uint64_t b = ~var_pattern( i ) & var_pattern( i + 1 );
  const uint32_t s = 1u << i;
  return ( ( t & ~( a | b ) ) | ( ( t & a ) << s ) | ( ( t & b ) >> s ) ) & mask;
}

uint32_t ones_where( uint64_t t, uint32_t i, bool v, uint64_t mask )
{
  uint64_t m = v ? var_pattern( i ) : ~var_pattern( i );
  return static_cast<uint32_t>( std::popcount( t & m & mask ) );
}

/* t(y) = f(x) with x[p[j]] = y[j] */
uint64_t permute( uint64_t f, uint32_t k, const std::array<uint8_t, 6>& p )
{
  uint64_t t = 0;
  for ( uint32_t m = 0; m < ( 1u << k ); ++m )
  {
    uint32_t x = 0;
    for ( uint32_t j = 0; j < k; ++j )
      if ( ( m >> j ) & 1 )
        x |= 1u << p[j];
    if ( ( f >> x ) & 1 )
      t |= uint64_t( 1 ) << m;
  }
  return t;
}

npn_result exact_canon( const truth_table& f )
{
  const uint32_t k = f.k;
  const uint64_t mask = f.mask();
  npn_result best;
  best.canon = { k, f.bits & mask };
  std::array<uint8_t, 6> p{ 0, 1, 2, 3, 4, 5 };
  do
  {
    uint64_t t = permute( f.bits & mask, k, p );
    uint8_t neg = 0;
    // gray code over input negations
    for ( uint32_t g = 0; g < ( 1u << k ); ++g )
    {
      if ( g )
      {
        uint32_t j = std::countr_zero( g );
        t = flip_var( t, j, mask );
        neg ^= 1u << j;
      }
      for ( bool o : { false, true } )
      {
        uint64_t v = o ? ~t & mask : t;
        if ( v < best.canon.bits )
        {
          best.canon.bits = v;
          best.t.leaf = p;
          best.t.neg = neg;
          best.t.out_neg = o;
        }
      }
    }
  } while ( std::next_permutation( p.begin(), p.begin() + k ) );
  return best;
}

/* tracks the transform along flips and swaps */
struct tracked
{
  uint64_t t;
  uint64_t mask;
  npn_transform x;

  void flip( uint32_t j )
  {
    t = flip_var( t, j, mask );
    x.neg ^= 1u << j;
  }
  void swap( uint32_t i )
  {
    t = swap_adjacent( t, i, mask );
    std::swap( x.leaf[i], x.leaf[i + 1] );
    bool a = ( x.neg >> i ) & 1, b = ( x.neg >> ( i + 1 ) ) & 1;
    x.neg = static_cast<uint8_t>( ( x.neg & ~( 3u << i ) ) | ( uint32_t( b ) << i ) | ( uint32_t( a ) << ( i + 1 ) ) );
  }
  void out()
  {
    t = ~t & mask;
    x.out_neg = !x.out_neg;
  }
};

tracked heuristic_step( tracked s, uint32_t k )
{
  const uint32_t half = 1u << ( k - 1 );
  if ( static_cast<uint32_t>( std::popcount( s.t ) ) > half )
    s.out();
  for ( uint32_t j = 0; j < k; ++j )
    if ( ones_where( s.t, j, true, s.mask ) > ones_where( s.t, j, false, s.mask ) )
      s.flip( j );
  // sort variables by ones in the positive cofactor, heaviest last
  for ( uint32_t pass = 0; pass < k; ++pass )
    for ( uint32_t i = 0; i + 1 < k; ++i )
      if ( ones_where( s.t, i, true, s.mask ) > ones_where( s.t, i + 1, true, s.mask ) )
        s.swap( i );
  // descent over single moves
  for ( bool improved = true; improved; )
  {
    improved = false;
    for ( uint32_t m = 0; m < 2 * k; ++m )
    {
      tracked c = s;
      if ( m < k )
        c.flip( m );
      else if ( m - k + 1 < k )
        c.swap( m - k );
      else
        c.out();
      if ( c.t < s.t )
      {
        s = c;
        improved = true;
      }
    }
  }
  return s;
}

/* repeats the step until it stops improving, so canonical tables are fixed points */
npn_result heuristic_canon( const truth_table& f )
{
  tracked s{ f.bits & f.mask(), f.mask(), {} };
  for ( ;; )
  {
    auto n = heuristic_step( s, f.k );
    if ( n.t >= s.t )
      break;
    s = n;
  }
  return { { f.k, s.t }, s.x };
}

} // namespace

npn_result npn_canonize( const truth_table& f )
{
  if ( f.k > 6 )
    throw internal_error( "npn_canonize: more than 6 inputs" );
  if ( f.k <= 4 )
    return exact_canon( f );
  return heuristic_canon( f );
}

truth_table npn_apply( const truth_table& f, const npn_transform& t )
{
  const uint64_t mask = f.mask();
  uint64_t r = 0;
  for ( uint32_t m = 0; m < ( 1u << f.k ); ++m )
  {
    uint32_t x = 0;
    for ( uint32_t j = 0; j < f.k; ++j )
      if ( ( ( m >> j ) & 1 ) ^ ( ( t.neg >> j ) & 1 ) )
        x |= 1u << t.leaf[j];
    if ( ( ( f.bits >> x ) & 1 ) ^ t.out_neg )
      r |= uint64_t( 1 ) << m;
  }
  return { f.k, r & mask };
}

uint32_t count_npn_classes( uint32_t k )
{
  if ( k > 4 )
    throw user_error( "count_npn_classes: k must be at most 4" );
  std::unordered_set<uint64_t> classes;
  const uint64_t n = uint64_t( 1 ) << ( 1u << k );
  for ( uint64_t f = 0; f < n; ++f )
    classes.insert( exact_canon( { k, f } ).canon.bits );
  return static_cast<uint32_t>( classes.size() );
}

} // namespace svsyn
