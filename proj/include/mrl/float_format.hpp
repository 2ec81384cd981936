#ifndef MRL_FLOAT_FORMAT_HPP
#define MRL_FLOAT_FORMAT_HPP

#include <string>

namespace mrl {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace mrl

#endif
