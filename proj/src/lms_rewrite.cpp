#include "svsyn/diagnostic.hpp"
#include "svsyn/lms.hpp"

#include <algorithm>
#include <map>

namespace svsyn
{

namespace
{

uint32_t cone_volume( const aig& g, uint32_t root, const std::vector<uint32_t>& leaves )
{
  std::vector<uint32_t> stack{ root }, seen;
  uint32_t v = 0;
  while ( !stack.empty() )
  {
    uint32_t n = stack.back();
    stack.pop_back();
    if ( std::binary_search( leaves.begin(), leaves.end(), n ) || std::find( seen.begin(), seen.end(), n ) != seen.end() )
      continue;
    seen.push_back( n );
    if ( !g.is_and( n ) )
      continue;
    ++v;
    stack.push_back( lit_node( g.node( n ).f0 ) );
    stack.push_back( lit_node( g.node( n ).f1 ) );
  }
  return v;
}

bool dominates( const cut& a, const cut& b )
{
  return a.leaves.size() <= b.leaves.size() && std::includes( b.leaves.begin(), b.leaves.end(), a.leaves.begin(), a.leaves.end() );
}

class canon_cache
{
public:
  const npn_result& get( const truth_table& f )
  {
    auto [it, fresh] = map_.try_emplace( { f.k, f.bits } );
    if ( fresh )
      it->second = npn_canonize( f );
    return it->second;
  }

private:
  std::map<std::pair<uint32_t, uint64_t>, npn_result> map_;
};

/* a literal of the graph or a node that does not exist yet */
struct vlit
{
  bool real;
  lit l;
  uint32_t level;
};

struct decision
{
  std::vector<uint32_t> leaves;
  npn_transform t;
  const lms_impl* impl;
};

struct evaluation
{
  int32_t gain;
  uint32_t level;
};

class pass
{
public:
  pass( const aig& g, const lms_db& db, rewrite_objective obj, canon_cache& cache )
      : g_( g ), db_( db ), obj_( obj ), cache_( cache ), refs_( g.fanout_counts() ), levels_( g.levels() ) {}

  aig run( uint32_t& replacements )
  {
    auto cuts = enumerate_cuts( g_, 4, 8 );
    std::vector<std::optional<decision>> dec( g_.size() );
    for ( uint32_t n = 0; n < g_.size(); ++n )
    {
      if ( !g_.is_and( n ) )
        continue;
      std::optional<decision> best;
      evaluation best_eval{ 0, levels_[n] };
      for ( const auto& c : cuts[n] )
      {
        if ( c.leaves.size() < 2 || ( c.leaves.size() == 1 && c.leaves[0] == n ) )
          continue;
        auto tt = cut_function( g_, make_lit( n ), c.leaves );
        const auto& cr = cache_.get( tt );
        const auto* impl = db_.find( cr.canon );
        if ( !impl )
          continue;
        decision d{ c.leaves, cr.t, impl };
        auto e = evaluate( n, d );
        bool better = false;
        if ( obj_ == rewrite_objective::area )
          better = e.gain > best_eval.gain || ( e.gain == best_eval.gain && best && e.level < best_eval.level );
        else
          better = e.gain >= 0 && ( e.level < best_eval.level || ( e.level == best_eval.level && best && e.gain > best_eval.gain ) );
        if ( better )
        {
          best = d;
          best_eval = e;
        }
      }
      dec[n] = best;
    }
    return build( dec, replacements );
  }

private:
  const aig& g_;
  const lms_db& db_;
  rewrite_objective obj_;
  canon_cache& cache_;
  std::vector<uint32_t> refs_;
  std::vector<uint32_t> levels_;

  /* nodes freed when n goes away, stopping at the leaves */
  std::vector<uint32_t> mffc( uint32_t n, const std::vector<uint32_t>& leaves )
  {
    std::vector<uint32_t> out, touched;
    std::vector<uint32_t> stack{ n };
    while ( !stack.empty() )
    {
      uint32_t x = stack.back();
      stack.pop_back();
      out.push_back( x );
      for ( lit f : { g_.node( x ).f0, g_.node( x ).f1 } )
      {
        uint32_t m = lit_node( f );
        touched.push_back( m );
        if ( --refs_[m] == 0 && g_.is_and( m ) && !std::binary_search( leaves.begin(), leaves.end(), m ) )
          stack.push_back( m );
      }
    }
    for ( auto m : touched )
      ++refs_[m];
    std::sort( out.begin(), out.end() );
    return out;
  }

  evaluation evaluate( uint32_t n, const decision& d )
  {
    auto freed = mffc( n, d.leaves );
    const auto& impl = *d.impl;
    std::vector<vlit> sig( impl.k + 1 + impl.size() );
    sig[0] = { true, lit_false, 0 };
    for ( uint32_t j = 0; j < impl.k; ++j )
    {
      uint32_t leaf = d.leaves[d.t.leaf[j]];
      sig[j + 1] = { true, make_lit( leaf, ( d.t.neg >> j ) & 1 ), levels_[leaf] };
    }
    auto get = [&]( uint32_t l ) {
      vlit v = sig[l >> 1];
      if ( v.real )
        v.l = lit_not_cond( v.l, l & 1 );
      return v;
    };
    int32_t added = 0;
    for ( uint32_t i = 0; i < impl.size(); ++i )
    {
      vlit a = get( impl.nodes[i][0] ), b = get( impl.nodes[i][1] );
      vlit& r = sig[impl.k + 1 + i];
      if ( a.real && b.real )
      {
        lit x = std::min( a.l, b.l ), y = std::max( a.l, b.l );
        if ( x == lit_false || x == lit_not( y ) )
        {
          r = { true, lit_false, 0 };
          continue;
        }
        if ( x == lit_true || x == y )
        {
          r = { true, y, levels_[lit_node( y )] };
          continue;
        }
        uint32_t found = g_.find_and( x, y );
        if ( found != UINT32_MAX )
        {
          r = { true, make_lit( found ), levels_[found] };
          if ( std::binary_search( freed.begin(), freed.end(), found ) )
            ++added;
          continue;
        }
      }
      r = { false, 0, 1 + std::max( a.level, b.level ) };
      ++added;
    }
    return { static_cast<int32_t>( freed.size() ) - added, get( impl.out ).level };
  }

  aig build( const std::vector<std::optional<decision>>& dec, uint32_t& replacements )
  {
    std::vector<bool> needed( g_.size(), false );
    for ( auto l : g_.co_lits() )
      needed[lit_node( l )] = true;
    for ( uint32_t n = g_.size(); n-- > 0; )
      if ( needed[n] && g_.is_and( n ) )
      {
        if ( dec[n] )
          for ( auto l : dec[n]->leaves )
            needed[l] = true;
        else
        {
          needed[lit_node( g_.node( n ).f0 )] = true;
          needed[lit_node( g_.node( n ).f1 )] = true;
        }
      }
    aig r;
    r.in_ports = g_.in_ports;
    r.out_ports = g_.out_ports;
    r.clock = g_.clock;
    std::vector<lit> map( g_.size(), lit_false );
    for ( size_t i = 0; i < g_.pis().size(); ++i )
      map[g_.pis()[i]] = r.add_pi( g_.pi_names()[i] );
    for ( const auto& l : g_.latches() )
      map[l.node] = r.add_latch( l.name );
    auto m = [&]( lit l ) { return lit_not_cond( map[lit_node( l )], lit_compl( l ) ); };
    for ( uint32_t n = 0; n < g_.size(); ++n )
    {
      if ( !needed[n] || !g_.is_and( n ) )
        continue;
      if ( !dec[n] )
      {
        map[n] = r.add_and( m( g_.node( n ).f0 ), m( g_.node( n ).f1 ) );
        continue;
      }
      const auto& d = *dec[n];
      const auto& impl = *d.impl;
      std::vector<lit> sig( impl.k + 1 + impl.size(), lit_false );
      for ( uint32_t j = 0; j < impl.k; ++j )
        sig[j + 1] = lit_not_cond( map[d.leaves[d.t.leaf[j]]], ( d.t.neg >> j ) & 1 );
      auto get = [&]( uint32_t l ) { return lit_not_cond( sig[l >> 1], l & 1 ); };
      for ( uint32_t i = 0; i < impl.size(); ++i )
        sig[impl.k + 1 + i] = r.add_and( get( impl.nodes[i][0] ), get( impl.nodes[i][1] ) );
      map[n] = lit_not_cond( get( impl.out ), d.t.out_neg );
      ++replacements;
    }
    for ( const auto& p : g_.pos() )
      r.add_po( m( p.l ), p.name );
    for ( uint32_t i = 0; i < g_.latches().size(); ++i )
      r.set_next( i, m( g_.latches()[i].next ) );
    return cleanup( r );
  }
};

} // namespace

std::vector<std::vector<cut>> enumerate_cuts( const aig& g, uint32_t k, uint32_t limit )
{
  if ( k == 0 || k > 6 )
    throw user_error( "enumerate_cuts: k must be in 1..6" );
  std::vector<std::vector<cut>> cuts( g.size() );
  for ( uint32_t n = 0; n < g.size(); ++n )
  {
    auto& cs = cuts[n];
    if ( n == 0 )
    {
      cs.push_back( { {}, 0 } );
      continue;
    }
    cs.push_back( { { n }, 0 } );
    if ( !g.is_and( n ) )
      continue;
    std::vector<cut> cand;
    for ( const auto& a : cuts[lit_node( g.node( n ).f0 )] )
      for ( const auto& b : cuts[lit_node( g.node( n ).f1 )] )
      {
        cut c;
        std::set_union( a.leaves.begin(), a.leaves.end(), b.leaves.begin(), b.leaves.end(), std::back_inserter( c.leaves ) );
        if ( c.leaves.size() > k )
          continue;
        bool dominated = false;
        for ( const auto& o : cand )
          if ( dominates( o, c ) )
          {
            dominated = true;
            break;
          }
        if ( dominated )
          continue;
        std::erase_if( cand, [&]( const cut& o ) { return dominates( c, o ); } );
        cand.push_back( std::move( c ) );
      }
    for ( auto& c : cand )
      c.volume = cone_volume( g, n, c.leaves );
    std::sort( cand.begin(), cand.end(), []( const cut& a, const cut& b ) {
      if ( a.leaves.size() != b.leaves.size() )
        return a.leaves.size() < b.leaves.size();
      if ( a.volume != b.volume )
        return a.volume < b.volume;
      return a.leaves < b.leaves;
    } );
    for ( auto& c : cand )
    {
      if ( cs.size() >= limit )
        break;
      cs.push_back( std::move( c ) );
    }
  }
  return cuts;
}

std::set<truth_table> harvest( const aig& g, uint32_t k, uint32_t limit )
{
  canon_cache cache;
  std::set<truth_table> out;
  auto cuts = enumerate_cuts( g, k, limit );
  for ( uint32_t n = 0; n < g.size(); ++n )
    if ( g.is_and( n ) )
      for ( const auto& c : cuts[n] )
        if ( !( c.leaves.size() == 1 && c.leaves[0] == n ) )
          out.insert( cache.get( cut_function( g, make_lit( n ), c.leaves ) ).canon );
  return out;
}

rewrite_stats rewrite( aig& g, const lms_db& db, rewrite_objective obj, uint32_t max_passes )
{
  rewrite_stats st;
  g = cleanup( g );
  st.nodes_before = g.num_ands();
  st.depth_before = g.depth();
  canon_cache cache;
  for ( uint32_t p = 0; p < max_passes; ++p )
  {
    uint32_t reps = 0;
    auto r = pass( g, db, obj, cache ).run( reps );
    bool accept = false;
    if ( obj == rewrite_objective::area )
      accept = r.num_ands() < g.num_ands();
    else
      accept = r.num_ands() <= g.num_ands() && r.depth() <= g.depth() && ( r.depth() < g.depth() || r.num_ands() < g.num_ands() );
    if ( !accept )
      break;
    g = std::move( r );
    st.replacements += reps;
    ++st.passes;
  }
  st.nodes_after = g.num_ands();
  st.depth_after = g.depth();
  return st;
}

} // namespace svsyn
