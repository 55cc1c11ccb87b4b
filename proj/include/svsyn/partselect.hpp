#pragma once

#include "svsyn/word_netlist.hpp"

#include <cstdint>
#include <vector>

namespace svsyn
{

/*! \brief A SHIFTX whose shift amount is a constant multiple of an index. */
struct stride_match
{
  uint32_t cell = 0;      // SHIFTX cell index
  uint32_t index_net = 0; // the index (significant bits only after rewrite)
  uint32_t stride = 1;    // bits
  uint32_t block_width = 0;
  uint32_t blocks = 0;
  /* false when the rewrite would change the function (block wider than the
   * stride, or an amount that can wrap around) */
  bool rewritable = false;
};

/*! \brief SHIFTX cells with amount MUL(idx, c), SHL(idx, k) or {idx, k'b0}. */
std::vector<stride_match> detect_strides( const word_netlist& wn );

/*! \brief Repacks the data into power-of-two blocks and shifts by SHL(idx, log2 p).
 * Requires `m.rewritable`. */
void pad_and_rewrite( word_netlist& wn, const stride_match& m );

/*! \brief Turns `(d >> n)[w-1:0]` into SHIFTX, then rewrites every rewritable
 * match. Returns the number of rewritten cells. */
uint32_t partselect_pass( word_netlist& wn );

} // namespace svsyn
