#pragma once

#include "svsyn/ast.hpp"
#include "svsyn/bitvec.hpp"
#include "svsyn/elaborate.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace svsyn
{

struct port_info
{
  std::string name;
  uint32_t width = 1;
  bool operator==( const port_info& ) const = default;
};

/*! \brief Port signature of a simulation model. Clock inputs are implicit and not listed. */
struct signature
{
  std::vector<port_info> inputs;
  std::vector<port_info> outputs;

  uint32_t input_bits() const;
  bool operator==( const signature& ) const = default;
};

/*! \brief Bit-sliced port value: word `b` holds bit `b` of the value for 64 lanes. */
using lanes = std::vector<uint64_t>;

/*! \brief A simulatable design. All state starts at zero after `reset`. */
class sim_model
{
public:
  virtual ~sim_model() = default;

  virtual const signature& sig() const = 0;
  virtual bool is_sequential() const = 0;
  virtual void reset() = 0;

  /*! \brief One cycle on `n_lanes` lanes: outputs are sampled after the inputs
   * settle, then the clock ticks. */
  virtual void step( const std::vector<lanes>& in, std::vector<lanes>& out, uint32_t n_lanes = 64 ) = 0;
};

/*! \brief Helper base for models that evaluate one lane at a time. */
class scalar_model : public sim_model
{
public:
  void step( const std::vector<lanes>& in, std::vector<lanes>& out, uint32_t n_lanes = 64 ) override;

protected:
  /*! \brief Evaluates one cycle of lane `lane` (state is per lane). */
  virtual std::vector<bitvec> step_lane( uint32_t lane, const std::vector<bitvec>& inputs ) = 0;
};

/*! \brief Reference interpreter over an (unelaborated) AST. It evaluates
 * parameters and generate constructs itself and never calls the elaborator. */
std::unique_ptr<sim_model> make_ast_interpreter( const ast& design, const std::string& top, const param_env& overrides = {} );

/*! \brief Runs a model on lane 0 for `inputs.size()` cycles from reset; returns outputs per cycle. */
std::vector<std::vector<bitvec>> simulate( sim_model& m, const std::vector<std::vector<bitvec>>& inputs );

enum class verdict
{
  equivalent,
  counterexample,
  inconclusive
};

struct equiv_options
{
  uint32_t cap_bits = 22; // exhaustive check limit on total input bits
  uint32_t cycles = 8;    // bounded depth for sequential designs
};

struct equiv_result
{
  verdict result = verdict::inconclusive;
  bool probabilistic = false;
  uint64_t vectors = 0;
  std::string message;
  uint64_t seed = 0;
  uint64_t vector_index = 0; // index of the failing vector
  // counterexample, per cycle
  std::vector<std::vector<bitvec>> inputs;
  std::vector<std::vector<bitvec>> outputs_a;
  std::vector<std::vector<bitvec>> outputs_b;

  std::string label() const; // "equivalent", "equivalent (probabilistic)", ...
};

/*! \brief Exhaustive comparison over all input rows (and all input sequences of
 * `cycles` cycles for sequential designs). Over the cap the verdict is inconclusive. */
equiv_result equiv_exhaustive( sim_model& a, sim_model& b, const equiv_options& opts = {} );

/*! \brief Seeded random comparison of `vectors` input vectors (input sequences for sequential designs). */
equiv_result equiv_random( sim_model& a, sim_model& b, uint64_t vectors, uint64_t seed, const equiv_options& opts = {} );

/*! \brief Value-change text of a counterexample. */
std::string dump_counterexample( const equiv_result& r, const signature& sig );

} // namespace svsyn
