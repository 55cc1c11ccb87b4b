#include <doctest.h>

#include "svsyn/bitvec.hpp"

#include <random>

using namespace svsyn;

TEST_CASE( "bitvec basic arithmetic wraps at width" )
{
  bitvec a( 8, 200 ), b( 8, 100 );
  CHECK( ( a + b ).to_u64() == 44 );
  CHECK( ( b - a ).to_u64() == 156 );
  CHECK( ( a * b ).to_u64() == ( 20000 % 256 ) );
  CHECK( bitvec( 8, 0xf0 ).to_i64() == -16 );
  CHECK( bitvec( 8, 0x80 ).ashr( 3 ).to_u64() == 0xf0 );
  CHECK( bitvec( 8, 0x80 ).lshr( 3 ).to_u64() == 0x10 );
  CHECK( bitvec( 8, 7 ).udiv( bitvec( 8, 0 ) ).is_zero() );
}

TEST_CASE( "bitvec multiword ops agree with 64-bit reference on random values" )
{
  std::mt19937_64 rng( 7 );
  for ( int i = 0; i < 2000; ++i )
  {
    uint64_t x = rng(), y = rng();
    uint32_t sh = rng() % 67;
    bitvec a = bitvec( 64, x ).resized( 130, false ), b = bitvec( 64, y ).resized( 130, false );
    unsigned __int128 sum = static_cast<unsigned __int128>( x ) + y;
    CHECK( ( a + b ).slice( 0, 64 ).to_u64() == static_cast<uint64_t>( sum ) );
    CHECK( ( a + b ).bit( 64 ) == static_cast<bool>( sum >> 64 ) );
    unsigned __int128 prod = static_cast<unsigned __int128>( x ) * y;
    CHECK( ( a * b ).slice( 64, 64 ).to_u64() == static_cast<uint64_t>( prod >> 64 ) );
    CHECK( a.shl( sh ).lshr( sh ) == a );
    if ( y )
    {
      CHECK( a.udiv( b ).to_u64() == x / y );
      CHECK( a.urem( b ).to_u64() == x % y );
    }
  }
}

TEST_CASE( "bitvec parse and print" )
{
  auto v = bitvec::parse( "dead_beef", 16, 32 );
  REQUIRE( v );
  CHECK( v->to_hex() == "deadbeef" );
  CHECK( v->to_dec() == "3735928559" );
  CHECK( bitvec::parse( "129", 8, 8 ) == std::nullopt );
  auto big = bitvec::parse( "340282366920938463463374607431768211455", 10, 128 );
  REQUIRE( big );
  CHECK( big->is_ones() );
  CHECK( big->to_dec() == "340282366920938463463374607431768211455" );
  CHECK( bitvec::from_bits( "1010" ).to_u64() == 10 );
  CHECK( bitvec( 6, 5 ).to_bin() == "000101" );
}

TEST_CASE( "signed division truncates toward zero" )
{
  bitvec m7( 8, static_cast<uint64_t>( -7 ) ), two( 8, 2 );
  CHECK( m7.sdiv( two ).to_i64() == -3 );
  CHECK( m7.srem( two ).to_i64() == -1 );
  CHECK( to_index( m7, true ) == -7 );
  CHECK( to_index( m7, false ) == 249 );
}
