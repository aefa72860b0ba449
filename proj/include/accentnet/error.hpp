#ifndef ACCENTNET_ERROR_HPP
#define ACCENTNET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace accentnet {

// Error categories map onto CLI exit codes: usage -> 1, data -> 2, internal -> 3.
enum class ErrorKind { usage, data, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void usage_error(const std::string& msg) { throw Error(ErrorKind::usage, msg); }
[[noreturn]] inline void data_error(const std::string& msg) { throw Error(ErrorKind::data, msg); }
[[noreturn]] inline void internal_error(const std::string& msg) { throw Error(ErrorKind::internal, msg); }

inline void check_internal(bool cond, const std::string& msg) {
  if (!cond) internal_error(msg);
}

}  // namespace accentnet

#endif
