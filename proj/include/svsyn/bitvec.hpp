#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svsyn
{

/*! \brief Fixed-width two-valued bit vector.
 *
 * All arithmetic is modulo 2^width. Binary operations require equal widths;
 * callers resize first. Bits above `width` are always kept zero.
 */
class bitvec
{
public:
  bitvec() = default;
  explicit bitvec( uint32_t width, uint64_t value = 0 );

  static bitvec ones( uint32_t width );
  static bitvec from_bits( std::string_view binary ); // MSB first, only 0/1

  /*! \brief Parses digits in the given radix (2, 8, 10 or 16); underscores are skipped.
   * Returns nullopt on bad digits. The value is truncated to `width`. */
  static std::optional<bitvec> parse( std::string_view digits, unsigned radix, uint32_t width );

  uint32_t width() const { return width_; }
  bool bit( uint32_t i ) const;
  void set_bit( uint32_t i, bool v );
  bool msb() const { return width_ > 0 && bit( width_ - 1 ); }

  uint64_t to_u64() const { return words_.empty() ? 0 : words_[0]; }
  int64_t to_i64() const; // sign-extended from width when width < 64
  bool is_zero() const;
  bool is_ones() const;
  bool fits_u64() const; // no bits set above bit 63
  uint32_t popcount() const;
  uint32_t min_bits_unsigned() const; // position of highest set bit + 1 (0 for zero)

  bitvec resized( uint32_t width, bool sign_extend ) const;
  bitvec slice( int64_t lo, uint32_t width ) const; // bits outside [0, width()) read zero
  void set_slice( int64_t lo, const bitvec& v );    // bits outside range ignored
  static bitvec concat( const bitvec& hi, const bitvec& lo );

  bitvec operator~() const;
  bitvec operator&( const bitvec& o ) const;
  bitvec operator|( const bitvec& o ) const;
  bitvec operator^( const bitvec& o ) const;
  bitvec operator+( const bitvec& o ) const;
  bitvec operator-( const bitvec& o ) const;
  bitvec operator*( const bitvec& o ) const;
  bitvec negated() const;

  bitvec udiv( const bitvec& o ) const; // x / 0 == 0
  bitvec urem( const bitvec& o ) const; // x % 0 == 0
  bitvec sdiv( const bitvec& o ) const;
  bitvec srem( const bitvec& o ) const;

  bitvec shl( uint64_t n ) const;
  bitvec lshr( uint64_t n ) const;
  bitvec ashr( uint64_t n ) const;

  bool ult( const bitvec& o ) const;
  bool slt( const bitvec& o ) const;

  std::string to_hex() const; // no prefix, at least one digit
  std::string to_dec() const; // unsigned decimal
  std::string to_bin() const; // MSB first, exactly width digits

  bool operator==( const bitvec& o ) const = default;
  std::strong_ordering operator<=>( const bitvec& o ) const;

private:
  uint32_t width_ = 0;
  std::vector<uint64_t> words_;

  void mask_top();
  static uint32_t words_for( uint32_t width ) { return ( width + 63 ) / 64; }
};

/*! \brief Saturating conversion of an index value to a signed 64-bit integer. */
int64_t to_index( const bitvec& v, bool is_signed );

} // namespace svsyn
