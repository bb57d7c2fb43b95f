#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wig {

using cplx = std::complex<double>;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorCode {
  NonSymmetric,
  SingularL,
  OddDimension,
  DimMismatch,
  GridMismatch,
  OffLattice,
  OrderTooHigh,
  ZeroWindow,
  LatticeMismatch,
  RankMismatch,
  FactorizationFailed,
  BadExponent,
  UnsupportedWeight,
  KernelTooLarge,
  IllConditioned,
  IllConditionedS,
  UnstableStep,
  NotHamiltonian,
  NotSymplectic,
  IO,
  FormatVersion,
  Usage,
  UnknownSuite,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wig
