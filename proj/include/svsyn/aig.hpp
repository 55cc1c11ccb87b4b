#pragma once

#include "svsyn/verify.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace svsyn
{

/* literal = 2 * node + complement; literal 0 is constant false */
using lit = uint32_t;

constexpr lit lit_false = 0;
constexpr lit lit_true = 1;

inline lit make_lit( uint32_t node, bool c = false ) { return ( node << 1 ) | ( c ? 1u : 0u ); }
inline uint32_t lit_node( lit l ) { return l >> 1; }
inline bool lit_compl( lit l ) { return l & 1; }
inline lit lit_not( lit l ) { return l ^ 1; }
inline lit lit_not_cond( lit l, bool c ) { return l ^ ( c ? 1u : 0u ); }

enum class aig_kind : uint8_t
{
  const0,
  pi,
  latch,
  and_
};

struct aig_node
{
  aig_kind kind = aig_kind::const0;
  lit f0 = 0;
  lit f1 = 0;
};

struct aig_latch
{
  uint32_t node = 0;
  lit next = lit_false;
  std::string name;
};

struct aig_po
{
  lit l = lit_false;
  std::string name;
};

/*! \brief Structurally hashed and-inverter graph. Fanins always have smaller ids
 * than the node; latch outputs are combinational inputs, their next-state
 * literals combinational outputs. Latches reset to 0. */
class aig
{
public:
  aig();

  lit add_pi( std::string name );
  /*! \brief Adds a latch output; its next state is set with `set_next`. */
  lit add_latch( std::string name );
  void set_next( uint32_t latch_index, lit next );
  void add_po( lit l, std::string name );

  /*! \brief AND with constant propagation and structural hashing. */
  lit add_and( lit a, lit b );
  lit add_or( lit a, lit b ) { return lit_not( add_and( lit_not( a ), lit_not( b ) ) ); }
  /*! \brief XOR as three AND nodes. */
  lit add_xor( lit a, lit b );
  lit add_xnor( lit a, lit b ) { return lit_not( add_xor( a, b ) ); }
  /*! \brief s ? a : b as three AND nodes. */
  lit add_mux( lit s, lit a, lit b );
  lit add_maj( lit a, lit b, lit c );
  /*! \brief Existing AND node with these fanins (either order), or UINT32_MAX. */
  uint32_t find_and( lit a, lit b ) const;

  uint32_t size() const { return static_cast<uint32_t>( nodes_.size() ); }
  const aig_node& node( uint32_t n ) const { return nodes_[n]; }
  bool is_and( uint32_t n ) const { return nodes_[n].kind == aig_kind::and_; }
  bool is_ci( uint32_t n ) const { return nodes_[n].kind == aig_kind::pi || nodes_[n].kind == aig_kind::latch; }
  uint32_t num_ands() const { return num_ands_; }

  const std::vector<uint32_t>& pis() const { return pis_; }
  const std::vector<std::string>& pi_names() const { return pi_names_; }
  const std::vector<aig_latch>& latches() const { return latches_; }
  const std::vector<aig_po>& pos() const { return pos_; }

  /*! \brief Combinational outputs: primary outputs then latch next states. */
  std::vector<lit> co_lits() const;
  /*! \brief Logic level of every node (CIs and constant at 0). */
  std::vector<uint32_t> levels() const;
  uint32_t depth() const;
  /*! \brief References per node from ANDs and combinational outputs. */
  std::vector<uint32_t> fanout_counts() const;
  /*! \brief Throws internal_error on a broken ordering or a duplicate fanin pair. */
  void check() const;

  /* word-level port grouping, bits LSB first; used by simulators and dumps */
  std::vector<port_info> in_ports;
  std::vector<port_info> out_ports;
  std::string clock;

private:
  std::vector<aig_node> nodes_;
  std::unordered_map<uint64_t, uint32_t> strash_;
  std::vector<uint32_t> pis_;
  std::vector<std::string> pi_names_;
  std::vector<aig_latch> latches_;
  std::vector<aig_po> pos_;
  uint32_t num_ands_ = 0;
};

/*! \brief Copy without dangling nodes; constants are re-propagated and
 * duplicates re-hashed. Returns the number of removed AND nodes via `removed`. */
aig cleanup( const aig& g, uint32_t* removed = nullptr );

/*! \brief Constant propagation on an AIG; never increases the node count. */
uint32_t const_fold( aig& g );

/*! \brief Bit name of a port bit, `name[i]` (or `name` for 1-bit ports). */
std::string bit_name( const std::string& port, uint32_t width, uint32_t bit );

/*! \brief ASCII AIGER (`aag`) with symbol table. */
std::string write_aiger( const aig& g );
aig read_aiger( std::string_view text );

/*! \brief Truth table over k <= 6 variables; bit r holds f(row r). */
struct truth_table
{
  uint32_t k = 0;
  uint64_t bits = 0;

  uint64_t mask() const { return k >= 6 ? ~uint64_t( 0 ) : ( ( uint64_t( 1 ) << ( 1u << k ) ) - 1 ); }
  bool operator==( const truth_table& ) const = default;
  auto operator<=>( const truth_table& ) const = default;
};

/*! \brief Projection pattern of variable i in a 64-bit table. */
uint64_t var_pattern( uint32_t i );

/*! \brief Function of `root` with `leaves[i]` as variable i. Throws user_error if
 * the leaves do not cut the cone of root. */
truth_table cut_function( const aig& g, lit root, const std::vector<uint32_t>& leaves );

/*! \brief 64-lane combinational evaluation: values for the CIs (PIs, then
 * latches) in, value per node out. */
std::vector<uint64_t> simulate_nodes( const aig& g, const std::vector<uint64_t>& ci );

/*! \brief Simulation model using the word-level port grouping. */
std::unique_ptr<sim_model> make_aig_simulator( const aig& g );

} // namespace svsyn
