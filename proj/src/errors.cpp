#include "gfm/errors.hpp"

#include <sstream>

namespace gfm {

namespace {
std::string describe(const std::string& field, const std::string& constraint, double value) {
    std::ostringstream os;
    os.precision(12);
    os << "invalid " << field << " = " << value << " (requires " << constraint << ")";
    return os.str();
}
}  // namespace

ValidationError::ValidationError(std::string field, std::string constraint, double value)
    : Error(describe(field, constraint, value)), field_(std::move(field)) {}

}  // namespace gfm
