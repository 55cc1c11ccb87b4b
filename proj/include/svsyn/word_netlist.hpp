#pragma once

#include "svsyn/ast.hpp"
#include "svsyn/bitvec.hpp"
#include "svsyn/verify.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace svsyn
{

enum class wkind : uint8_t
{
  not_,   // y = ~a
  and_,   // y = a & b
  or_,    // y = a | b
  xor_,   // y = a ^ b
  mux,    // y = s ? a : b                      (s is 1 bit)
  shiftx, // y[k] = d[n + k], zero out of range; n is two's complement when is_signed
  shl,    // y = a << n                         (width of a)
  shr,    // y = a >> n, arithmetic when is_signed
  add,    // y = a + b
  sub,    // y = a - b
  mul,    // y = ext(a) * ext(b) mod 2^w; operands may be narrower than y
  fma,    // y = ext(a) * ext(b) + c mod 2^w; c has the width of y
  eq,     // y = a == b                         (1 bit)
  lt,     // y = a < b, signed when is_signed   (1 bit)
  concat, // y = {in[0], in[1], ...}, MSB first; a single input is a buffer
  slice,  // y = a[offset +: w]
  const_, // y = value
  dff     // y <= d on the global clock edge; resets to 0
};

const char* kind_name( wkind k );

struct wcell
{
  wkind kind = wkind::const_;
  std::vector<uint32_t> in; // net ids
  uint32_t out = 0;
  bool is_signed = false;
  uint32_t offset = 0; // slice
  bitvec value;        // const
  std::string name;    // `$kind$n`
};

struct wport
{
  std::string name;
  uint32_t net = 0;
};

/*! \brief Word-level netlist: nets with widths, cells with a single output net each. */
class word_netlist
{
public:
  std::vector<uint32_t> net_width;
  std::vector<wcell> cells;
  std::vector<wport> inputs;
  std::vector<wport> outputs;
  std::string clock; // empty for purely combinational designs
  bool negedge = false;

  uint32_t add_net( uint32_t width );
  /*! \brief Adds a cell driving a fresh net of `width` bits; returns the net. */
  uint32_t add_cell( wkind kind, std::vector<uint32_t> in, uint32_t width, bool is_signed = false, uint32_t offset = 0 );
  uint32_t add_const( const bitvec& v );
  uint32_t add_input( const std::string& name, uint32_t width );
  void add_output( const std::string& name, uint32_t net );

  uint32_t width( uint32_t net ) const { return net_width[net]; }

  /*! \brief Driving cell per net, -1 for inputs and undriven nets. */
  std::vector<int32_t> drivers() const;
  /*! \brief Number of cell and output references per net. */
  std::vector<uint32_t> fanouts() const;
  /*! \brief Cell indices with combinational fanins first; DFFs are sources. Throws
   * user_error naming the cycle if combinational cells form a loop. */
  std::vector<uint32_t> topo_order() const;
  /*! \brief Checks single drivers and per-kind width rules; throws internal_error. */
  void validate() const;
  /*! \brief Removes cells that reach no output; renumbers nets densely. */
  void sweep();

  size_t count( wkind k ) const;
  /*! \brief Signature of the design as a simulation model. */
  signature sig() const;

private:
  uint32_t next_name_ = 0;
};

/*! \brief Lowers an elaborated design (see `elaborate`) to a flat word netlist. */
word_netlist lower_words( const ast& elaborated, const std::string& top );

/*! \brief Replaces the use of every net by `map[net]` (identity where `map[net] == net`). */
void substitute_nets( word_netlist& wn, const std::vector<uint32_t>& map );

/*! \brief Constant folding, buffer and slice/concat simplification, multiplier
 * operand narrowing and dead cell removal. Returns the number of rewrites. */
uint32_t const_fold( word_netlist& wn );

/*! \brief Structural Verilog text of the netlist (one assignment per cell). */
std::string dump_verilog( const word_netlist& wn, const std::string& module_name = "netlist" );

/*! \brief Per-lane simulation model of a word netlist. */
std::unique_ptr<sim_model> make_word_simulator( const word_netlist& wn );

/*! \brief Evaluates one combinational cell on concrete operand values. */
bitvec eval_cell( const wcell& c, const std::vector<bitvec>& in, uint32_t width );

} // namespace svsyn
