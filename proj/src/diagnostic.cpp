#include "svsyn/diagnostic.hpp"

namespace svsyn
{

std::string diagnostic::format() const
{
  const char* sev = level == severity::error ? "error" : level == severity::warning ? "warning" : "note";
  return file + ":" + std::to_string( line ) + ":" + std::to_string( column ) + ": " + sev + ": " + message;
}

user_error::user_error( const source_loc& loc, const std::string& what, std::string code )
    : std::runtime_error( loc.file + ":" + std::to_string( loc.line ) + ":" + std::to_string( loc.column ) + ": error: " + what )
{
  diags_.push_back( diagnostic{ severity::error, loc.file, loc.line, loc.column, what, std::move( code ) } );
}

} // namespace svsyn
