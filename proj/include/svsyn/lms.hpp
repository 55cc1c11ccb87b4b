#pragma once

#include "svsyn/aig.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace svsyn
{

/* NPN */

/*! \brief canon(y) = out_neg ^ f(x) where x[leaf[j]] = y[j] ^ neg_j. */
struct npn_transform
{
  std::array<uint8_t, 6> leaf{ 0, 1, 2, 3, 4, 5 };
  uint8_t neg = 0;
  bool out_neg = false;
};

struct npn_result
{
  truth_table canon;
  npn_transform t;
};

/*! \brief Smallest table in the NPN class of f: exact for k <= 4, a deterministic
 * heuristic (normalize, sort, local descent) for k = 5, 6. */
npn_result npn_canonize( const truth_table& f );

/*! \brief Applies a transform to f (the canonical table when t came from npn_canonize). */
truth_table npn_apply( const truth_table& f, const npn_transform& t );

/*! \brief Number of NPN classes of k-input functions (k <= 4). */
uint32_t count_npn_classes( uint32_t k );

/* implementations */

/*! \brief A k-input AIG fragment. Literal 0 is const0, variable j is literal
 * 2 * (j + 1), node i is literal 2 * (k + 1 + i). */
struct lms_impl
{
  uint32_t k = 0;
  std::vector<std::array<uint32_t, 2>> nodes;
  uint32_t out = 0;
  bool exact = true;

  uint32_t size() const { return static_cast<uint32_t>( nodes.size() ); }
  uint32_t depth() const;
  truth_table function() const;
};

/*! \brief Minimum-size implementation found by iterative deepening up to
 * `max_nodes`; nullopt when nothing fits or the step budget runs out. */
std::optional<lms_impl> exact_synthesis( const truth_table& f, uint32_t max_nodes, uint64_t step_budget = 20000000,
                                         bool* out_of_budget = nullptr );

/*! \brief Shannon decomposition with constant and xor cofactor cases. */
lms_impl heuristic_synthesis( const truth_table& f );

/* database */

class lms_db
{
public:
  void add( const truth_table& canon, lms_impl impl );
  const lms_impl* find( const truth_table& canon ) const;
  size_t size() const { return entries_.size(); }
  const std::map<std::pair<uint32_t, uint64_t>, lms_impl>& entries() const { return entries_; }

  /*! \brief Text form, sorted by k then table. */
  std::string save() const;
  static lms_db load( const std::string& text );

private:
  std::map<std::pair<uint32_t, uint64_t>, lms_impl> entries_;
};

/*! \brief Every class with k <= kmax_full plus `extra` canonical tables. The
 * exact search gets `step_budget` steps per class before the heuristic result
 * is kept. */
lms_db build_database( uint32_t kmax_full, const std::set<truth_table>& extra = {}, uint64_t step_budget = 4000000 );

/* cuts */

struct cut
{
  std::vector<uint32_t> leaves; // sorted node ids
  uint32_t volume = 0;          // AND nodes inside
};

/*! \brief Priority cuts per node: trivial cut first, then by fewer leaves and smaller cone. */
std::vector<std::vector<cut>> enumerate_cuts( const aig& g, uint32_t k, uint32_t limit );

/*! \brief Canonical classes of every non-trivial cut of size <= k. */
std::set<truth_table> harvest( const aig& g, uint32_t k = 4, uint32_t limit = 8 );

/* rewriting */

enum class rewrite_objective
{
  area,
  depth
};

struct rewrite_stats
{
  uint32_t nodes_before = 0;
  uint32_t nodes_after = 0;
  uint32_t depth_before = 0;
  uint32_t depth_after = 0;
  uint32_t replacements = 0;
  uint32_t passes = 0;
};

/*! \brief Cut rewriting from the database. The node count never grows; with the
 * depth objective the depth does not grow either. */
rewrite_stats rewrite( aig& g, const lms_db& db, rewrite_objective obj = rewrite_objective::area, uint32_t max_passes = 4 );

} // namespace svsyn
