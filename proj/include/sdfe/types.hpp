#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdfe {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Error taxonomy shared by all modules. Everything derives from Error so
// callers (and the CLI exit-code mapping) can catch the whole family.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& msg) : Error(msg) {}
};

class NotConverged : public Error {
 public:
  explicit NotConverged(const std::string& msg) : Error(msg) {}
};

class DegenerateReply : public Error {
 public:
  explicit DegenerateReply(const std::string& msg) : Error(msg) {}
};

class DegenerateInput : public Error {
 public:
  explicit DegenerateInput(const std::string& msg) : Error(msg) {}
};

class DegenerateChain : public Error {
 public:
  explicit DegenerateChain(const std::string& msg) : Error(msg) {}
};

class NoPositiveRoot : public Error {
 public:
  explicit NoPositiveRoot(const std::string& msg) : Error(msg) {}
};

class PartitionInvalid : public Error {
 public:
  explicit PartitionInvalid(const std::string& msg) : Error(msg) {}
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class ThresholdNotBracketed : public Error {
 public:
  explicit ThresholdNotBracketed(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

}  // namespace sdfe
