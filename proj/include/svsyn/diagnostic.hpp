#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace svsyn
{

/*! \brief Source position. Locations never take part in structural equality of the AST. */
struct source_loc
{
  std::string file;
  uint32_t line = 0;
  uint32_t column = 0;

  friend bool operator==( const source_loc&, const source_loc& ) { return true; }
};

enum class severity
{
  note,
  warning,
  error
};

struct diagnostic
{
  severity level = severity::error;
  std::string file;
  uint32_t line = 0;
  uint32_t column = 0;
  std::string message;
  std::string code; // e.g. "syntax", "unsupported", "duplicate-module"

  /*! \brief `file:line:col: severity: message` */
  std::string format() const;
};

using diagnostics = std::vector<diagnostic>;

/*! \brief A user-facing error (bad input, bad configuration). Maps to exit code 1. */
class user_error : public std::runtime_error
{
public:
  explicit user_error( const std::string& what, diagnostics diags = {} )
      : std::runtime_error( what ), diags_( std::move( diags ) ) {}
  user_error( const source_loc& loc, const std::string& what, std::string code = "error" );

  const diagnostics& diags() const { return diags_; }

private:
  diagnostics diags_;
};

/*! \brief Violated internal invariant. Maps to exit code 2. */
class internal_error : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

} // namespace svsyn
