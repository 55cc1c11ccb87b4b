#pragma once

#include "svsyn/aig.hpp"
#include "svsyn/verify.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace svsyn
{

/*! \brief A library cell. Input i is truth-table variable i; inputs are named
 * A, B, C, D and the output Y. DFF is the only sequential cell. */
struct lib_cell
{
  std::string name;
  uint32_t k = 0;
  uint64_t tt = 0;
  double area_ge = 0;
  std::optional<double> delay_ns; // none for DFF
};

class cell_library
{
public:
  std::vector<lib_cell> cells;

  const lib_cell* find( const std::string& name ) const;
  const lib_cell& get( const std::string& name ) const;

  /*! \brief Throws user_error unless NAND2 is 1.0 GE, combinational delays are
   * positive, tables fit their input counts and the required cells exist. */
  void validate() const;

  static cell_library default_library();
  std::string to_json() const;
  static cell_library from_json( const std::string& text );
};

struct mapped_instance
{
  std::string name;
  std::string cell;
  std::vector<uint32_t> inputs; // nets
  uint32_t output = 0;
};

struct mapped_register
{
  std::string name;
  uint32_t d = 0, q = 0;
};

/*! \brief Net 0 is constant 0, net 1 constant 1, nets 2.. follow the inputs. */
struct mapped_netlist
{
  std::vector<std::string> input_names; // bit names, net 2 + i
  std::vector<std::pair<std::string, uint32_t>> outputs;
  std::vector<mapped_register> registers;
  std::vector<mapped_instance> instances; // topological order
  std::vector<port_info> in_ports, out_ports;
  std::string clock;
  uint32_t num_nets = 2;
};

enum class map_objective
{
  area,
  delay
};

/*! \brief Cut-based matching (k <= 4). The area result is never larger than the
 * NAND2+INV cover; the delay result is never slower than the area result. */
mapped_netlist map( const aig& g, const cell_library& lib, map_objective obj = map_objective::area );

/*! \brief Every AND node as NAND2 (+ INV where the positive phase is needed). */
mapped_netlist map_nand_inv( const aig& g, const cell_library& lib );

/*! \brief AIG of a mapped netlist built from the cell tables (for checking). */
aig to_aig( const mapped_netlist& mn, const cell_library& lib );

struct path_stage
{
  std::string instance;
  std::string cell;
  double delay_ns = 0;
  double arrival_ns = 0;
};

struct endpoint_slack
{
  std::string endpoint;
  double arrival_ns = 0;
  double slack_ns = 0;
};

struct timing_report
{
  double critical_path_ns = 0;
  std::optional<double> fmax_mhz; // none for an empty path
  std::string startpoint, endpoint;
  std::vector<path_stage> path;
  std::vector<endpoint_slack> endpoints; // sorted by name
};

/*! \brief Longest path with constant pin-to-output delays; ties go to the
 * lexicographically smaller name. Throws user_error on a combinational loop. */
timing_report sta( const mapped_netlist& mn, const cell_library& lib );

struct area_report
{
  double total_ge = 0;
  std::map<std::string, uint32_t> cells;
};

area_report area( const mapped_netlist& mn, const cell_library& lib );

/*! \brief Structural Verilog with behavioral cell modules, readable by the frontend. */
std::string write_mapped_verilog( const mapped_netlist& mn, const cell_library& lib, const std::string& module_name );

} // namespace svsyn
