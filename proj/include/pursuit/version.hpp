#ifndef PURSUIT_VERSION_HPP
#define PURSUIT_VERSION_HPP

namespace pursuit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pursuit

#endif  // PURSUIT_VERSION_HPP
