#pragma once

#include "svsyn/aig.hpp"
#include "svsyn/word_netlist.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace svsyn
{

enum class adder_arch
{
  ripple,
  sklansky,
  kogge_stone,
  brent_kung
};

const char* arch_name( adder_arch a );
std::optional<adder_arch> parse_arch( const std::string& s );

/* a bit vector of literals, LSB first */
using word = std::vector<lit>;

struct adder_out
{
  word sum;
  lit cout = lit_false;
  uint32_t stages = 0; // prefix levels; width for ripple
};

/*! \brief a + b + cin in the given architecture; a and b must have equal width. */
adder_out build_adder( aig& g, const word& a, const word& b, lit cin, adder_arch arch );

struct addend
{
  word bits;
  uint32_t offset = 0; // weight of bits[0]
};

struct csa_out
{
  word sum;
  word carry;
  uint32_t stages = 0;
};

/*! \brief Number of Dadda reduction stages for a column height of `n`. */
uint32_t dadda_stages( uint32_t n );

/*! \brief Dadda 3:2 / 2:2 reduction of the addends (mod 2^width) to two rows. */
csa_out build_csa_tree( aig& g, const std::vector<addend>& addends, uint32_t width );

struct booth_out
{
  word product;
  uint32_t rows = 0;
  uint32_t csa_stages = 0;
};

/*! \brief Radix-4 Booth product a * b (+ extra) mod 2^width. The multiplier is
 * extended by one bit (sign or zero) before recoding, so there are
 * ceil((|b| + 1) / 2) partial product rows. `extra`, if given, is one more row
 * of the carry-save tree (fused multiply-add). */
booth_out build_booth_multiplier( aig& g, const word& a, const word& b, bool is_signed, uint32_t width, adder_arch final_arch,
                                  const word* extra = nullptr );

/*! \brief Standalone adder with inputs a, b (and cin) and outputs s, cout. */
aig gen_adder( uint32_t width, adder_arch arch, bool carry_in );
/*! \brief Standalone multiplier with inputs a, b and output p of wa + wb bits. */
aig gen_booth_multiplier( uint32_t wa, uint32_t wb, bool is_signed, adder_arch final_arch = adder_arch::ripple );

/*! \brief Architecture choice per arithmetic cell (keyed by cell name). */
struct arith_selection
{
  adder_arch default_arch = adder_arch::ripple;
  std::map<std::string, adder_arch> overrides;
  bool fuse = true;

  adder_arch arch_for( const wcell& c ) const;
};

struct arch_policy
{
  enum class kind
  {
    min_area,
    min_delay,
    balanced
  } k = kind::min_area;
  uint32_t threshold = 16;

  /*! \brief `min_area`, `min_delay`, `balanced` or `balanced(N)`; throws user_error otherwise. */
  static arch_policy parse( const std::string& s );
  std::string text() const;
};

/*! \brief min_area: ripple everywhere; min_delay: Kogge-Stone everywhere;
 * balanced: ripple below the threshold width, Brent-Kung at or above it. */
arith_selection select_arch( const word_netlist& wn, const arch_policy& policy );

/*! \brief Rewrites ADD(MUL(a, b), c) / ADD(c, MUL(a, b)) into FMA(a, b, c) when the
 * MUL has no other reader and c has at most |a| + |b| significant bits. The
 * leftmost MUL operand wins. Returns the number of fused cells. */
uint32_t fuse_mac( word_netlist& wn, const arith_selection& sel );

/*! \brief Bit-level AIG of a word netlist; DFFs become latches. */
aig bitblast( const word_netlist& wn, const arith_selection& sel );

} // namespace svsyn
