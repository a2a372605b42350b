#pragma once

#include <stdexcept>
#include <string>

namespace cospm {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// kinematics
struct AngleAtBranchPoint : Error { using Error::Error; };
struct SingularJ1 : Error { using Error::Error; };
struct SingularJ2 : Error { using Error::Error; };
struct SingularT : Error { using Error::Error; };
struct NoRealSolution : Error { using Error::Error; };
struct DegenerateQuadratic : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };

// singularity certification
struct SingularJacobianAtCenter : Error { using Error::Error; };

// control
struct NoCrossing : Error { using Error::Error; };

// configuration / simulation
struct ConfigError : Error { using Error::Error; };
struct SimulationError : Error { using Error::Error; };

} // namespace cospm
