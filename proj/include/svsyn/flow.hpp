#pragma once

#include "svsyn/arith.hpp"
#include "svsyn/ast.hpp"
#include "svsyn/lms.hpp"
#include "svsyn/techmap.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace svsyn
{

/*! \brief Knobs of one synthesis run. JSON keys: `name`, `top`, `partselect`,
 * `lms`, `lms.objective` (area|depth|auto), `lms.db`, `mac.fuse`,
 * `adder.policy`, `adder.default`, `adder.overrides`, `map.objective`
 * (area|delay|auto), `library`, `seed`. */
struct flow_config
{
  std::string name = "default";
  std::string top;
  bool partselect = true;
  bool lms = true;
  bool fuse = true;
  std::string lms_mode = "auto";
  std::string map_mode = "auto";
  arch_policy policy;
  std::optional<adder_arch> default_arch;
  std::map<std::string, adder_arch> overrides;
  std::string db_path;
  std::string library_path;
  uint64_t seed = 1;

  /*! \brief Rejects unknown keys and bad values with user_error. Relative file
   * paths resolve against `base_dir`. */
  static flow_config from_json( const std::string& text, const std::string& base_dir = "" );
  std::string to_json() const;

  rewrite_objective resolved_lms_objective() const;
  map_objective resolved_map_objective() const;
};

struct pass_stat
{
  std::string pass;
  bool enabled = true;
  std::string unit; // what before/after count
  uint64_t before = 0, after = 0;
  uint64_t changes = 0;
};

struct flow_result
{
  std::string top;
  std::vector<pass_stat> passes;
  arith_selection selection;
  aig optimized;
  mapped_netlist netlist;
  area_report area;
  timing_report timing;

  std::string qor_json( const flow_config& cfg ) const;
};

/*! \brief lower, const_fold, partselect, fuse_mac, bitblast, lms, map, sta, in
 * that order. `db` may be null when LMS is off or the config names a DB file;
 * otherwise the k <= 3 database is used. */
flow_result run_flow( const ast& design, const flow_config& cfg, const cell_library& lib, const lms_db* db = nullptr );

struct sweep_row
{
  std::string config;
  bool ok = false;
  double area_ge = 0, delay_ns = 0;
  bool pareto = false;
  std::string error;
};

/*! \brief Runs each config (up to `jobs` at a time) and flags the pareto frontier. */
std::vector<sweep_row> at_sweep( const ast& design, const std::vector<flow_config>& configs, const cell_library& lib,
                                 const lms_db* db = nullptr, uint32_t jobs = 1 );

/*! \brief `config,area_ge,delay_ns,pareto`; failed rows carry `error`. */
std::string sweep_csv( const std::vector<sweep_row>& rows );

/*! \brief {min_area, balanced(16), min_delay} x {lms on, lms off}. */
std::vector<flow_config> default_sweep_configs( const std::string& top );

/*! \brief Canonical cut functions (k <= 4) of a design after bit-blasting with
 * ripple adders; feeds `build_database`. */
std::set<truth_table> harvest_design( const ast& design, const std::string& top );

/*! \brief Rounds to 1e-6 so reports print stably. */
double report_round( double v );

} // namespace svsyn
