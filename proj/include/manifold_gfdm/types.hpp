#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mgfdm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Complex = std::complex<double>;

// Base of all library errors. Specific conditions get their own type so
// callers can catch what they can handle.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateGradient : Error {
    using Error::Error;
};
struct InvalidPatch : Error {
    using Error::Error;
};
struct OverlappingInclusions : Error {
    using Error::Error;
};
struct UnmatchedPeriodicNode : Error {
    using Error::Error;
};
struct InsufficientNeighbors : Error {
    using Error::Error;
};
struct SingularStencil : Error {
    using Error::Error;
};
struct MissingConormal : Error {
    using Error::Error;
};
struct MissingStencil : Error {
    using Error::Error;
};
struct UntaggedNode : Error {
    using Error::Error;
};
struct SingularMatrix : Error {
    using Error::Error;
};
struct ZeroExactNorm : Error {
    using Error::Error;
};
struct EmptyBoundary : Error {
    using Error::Error;
};
struct UsageError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace mgfdm
