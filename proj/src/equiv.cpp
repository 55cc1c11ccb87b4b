#include "svsyn/verify.hpp"

#include <random>
#include <sstream>

namespace svsyn
{

std::string equiv_result::label() const
{
  switch ( result )
  {
  case verdict::equivalent:
    return probabilistic ? "equivalent (probabilistic)" : "equivalent";
  case verdict::counterexample:
    return "counterexample";
  default:
    return "inconclusive";
  }
}

namespace
{

void check_signatures( const sim_model& a, const sim_model& b )
{
  if ( a.sig() == b.sig() )
    return;
  auto text = []( const signature& s ) {
    std::string t = "(";
    for ( const auto& p : s.inputs )
      t += p.name + ":" + std::to_string( p.width ) + " ";
    t += "->";
    for ( const auto& p : s.outputs )
      t += " " + p.name + ":" + std::to_string( p.width );
    return t + ")";
  };
  throw user_error( "port signature mismatch: " + text( a.sig() ) + " vs " + text( b.sig() ) );
}

using cycle_inputs = std::vector<std::vector<lanes>>; // [cycle][port][bit]

/* Runs both models on one batch; returns a mask of lanes whose outputs ever differ. */
uint64_t run_batch( sim_model& a, sim_model& b, const cycle_inputs& in, uint32_t n_lanes )
{
  uint64_t mask = n_lanes >= 64 ? ~uint64_t( 0 ) : ( ( uint64_t( 1 ) << n_lanes ) - 1 );
  a.reset();
  b.reset();
  uint64_t diff = 0;
  std::vector<lanes> oa, ob;
  for ( const auto& cyc : in )
  {
    a.step( cyc, oa, n_lanes );
    b.step( cyc, ob, n_lanes );
    for ( size_t o = 0; o < oa.size(); ++o )
      for ( size_t w = 0; w < oa[o].size(); ++w )
        diff |= oa[o][w] ^ ob[o][w];
  }
  return diff & mask;
}

void fill_counterexample( equiv_result& r, sim_model& a, sim_model& b, const cycle_inputs& in, uint32_t lane )
{
  const auto& sig = a.sig();
  r.inputs.clear();
  for ( const auto& cyc : in )
  {
    std::vector<bitvec> row;
    for ( size_t p = 0; p < sig.inputs.size(); ++p )
    {
      bitvec v( sig.inputs[p].width );
      for ( uint32_t bit = 0; bit < sig.inputs[p].width; ++bit )
        v.set_bit( bit, ( cyc[p][bit] >> lane ) & 1 );
      row.push_back( v );
    }
    r.inputs.push_back( std::move( row ) );
  }
  r.outputs_a = simulate( a, r.inputs );
  r.outputs_b = simulate( b, r.inputs );
  if ( r.outputs_a == r.outputs_b )
    throw internal_error( "counterexample does not reproduce under re-simulation" );
  r.result = verdict::counterexample;
}

cycle_inputs make_inputs( const signature& sig, uint32_t cycles )
{
  cycle_inputs in( cycles );
  for ( auto& cyc : in )
  {
    cyc.resize( sig.inputs.size() );
    for ( size_t p = 0; p < sig.inputs.size(); ++p )
      cyc[p].assign( sig.inputs[p].width, 0 );
  }
  return in;
}

} // namespace

equiv_result equiv_exhaustive( sim_model& a, sim_model& b, const equiv_options& opts )
{
  check_signatures( a, b );
  equiv_result r;
  const auto& sig = a.sig();
  uint32_t cycles = ( a.is_sequential() || b.is_sequential() ) ? opts.cycles : 1;
  uint64_t nbits = uint64_t( sig.input_bits() ) * cycles;
  if ( nbits > opts.cap_bits )
  {
    r.message = std::to_string( nbits ) + " input bits exceed the exhaustive cap of " + std::to_string( opts.cap_bits );
    return r;
  }
  static const uint64_t lane_pattern[6] = { 0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
                                            0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull };
  uint64_t rows = uint64_t( 1 ) << nbits;
  auto in = make_inputs( sig, cycles );
  for ( uint64_t base = 0; base < rows; base += 64 )
  {
    uint32_t n_lanes = static_cast<uint32_t>( std::min<uint64_t>( 64, rows - base ) );
    uint32_t j = 0;
    for ( auto& cyc : in )
      for ( auto& port : cyc )
        for ( auto& word : port )
        {
          word = j < 6 ? lane_pattern[j] : ( ( ( base >> j ) & 1 ) ? ~uint64_t( 0 ) : 0 );
          ++j;
        }
    uint64_t diff = run_batch( a, b, in, n_lanes );
    if ( diff )
    {
      uint32_t lane = static_cast<uint32_t>( __builtin_ctzll( diff ) );
      r.vector_index = base + lane;
      r.vectors = base + lane + 1;
      fill_counterexample( r, a, b, in, lane );
      return r;
    }
    r.vectors += n_lanes;
  }
  r.result = verdict::equivalent;
  return r;
}

equiv_result equiv_random( sim_model& a, sim_model& b, uint64_t vectors, uint64_t seed, const equiv_options& opts )
{
  check_signatures( a, b );
  equiv_result r;
  r.seed = seed;
  r.probabilistic = true;
  if ( vectors == 0 )
  {
    r.message = "no vectors simulated";
    return r;
  }
  const auto& sig = a.sig();
  uint32_t cycles = ( a.is_sequential() || b.is_sequential() ) ? opts.cycles : 1;
  std::mt19937_64 rng( seed );
  auto in = make_inputs( sig, cycles );
  for ( uint64_t base = 0; base < vectors; base += 64 )
  {
    uint32_t n_lanes = static_cast<uint32_t>( std::min<uint64_t>( 64, vectors - base ) );
    for ( auto& cyc : in )
      for ( auto& port : cyc )
        for ( auto& word : port )
          word = rng();
    uint64_t diff = run_batch( a, b, in, n_lanes );
    if ( diff )
    {
      uint32_t lane = static_cast<uint32_t>( __builtin_ctzll( diff ) );
      r.vector_index = base + lane;
      r.vectors = base + lane + 1;
      r.probabilistic = false;
      fill_counterexample( r, a, b, in, lane );
      return r;
    }
    r.vectors += n_lanes;
  }
  r.result = verdict::equivalent;
  return r;
}

std::string dump_counterexample( const equiv_result& r, const signature& sig )
{
  std::ostringstream os;
  os << "$comment " << r.label() << " seed=" << r.seed << " vector=" << r.vector_index << " $end\n";
  auto val = []( const bitvec& v ) { return std::to_string( v.width() ) + "'h" + v.to_hex(); };
  for ( size_t c = 0; c < r.inputs.size(); ++c )
  {
    os << "#" << c << "\n";
    for ( size_t p = 0; p < sig.inputs.size(); ++p )
      os << "  " << sig.inputs[p].name << " = " << val( r.inputs[c][p] ) << "\n";
    for ( size_t o = 0; o < sig.outputs.size(); ++o )
    {
      const auto& va = r.outputs_a[c][o];
      const auto& vb = r.outputs_b[c][o];
      os << "  " << sig.outputs[o].name << " : " << val( va ) << " | " << val( vb ) << ( va == vb ? "" : "  <- differs" ) << "\n";
    }
  }
  return os.str();
}

} // namespace svsyn
