#include "hpmod/error.hpp"

namespace hpmod {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter: return "invalid-parameter";
        case ErrorCode::Domain: return "domain";
        case ErrorCode::NonConvergence: return "non-convergence";
        case ErrorCode::Divergence: return "divergence";
        case ErrorCode::Collinear: return "collinear";
        case ErrorCode::Pole: return "pole";
        case ErrorCode::InvalidCenter: return "invalid-center";
        case ErrorCode::OnBoundary: return "on-boundary";
        case ErrorCode::InvalidGeometry: return "invalid-geometry";
        case ErrorCode::UnsupportedParameter: return "unsupported-parameter";
        case ErrorCode::Meshing: return "meshing";
        case ErrorCode::InvertedElement: return "inverted-element";
        case ErrorCode::Assembly: return "assembly";
        case ErrorCode::Solver: return "solver";
        case ErrorCode::Location: return "location";
        case ErrorCode::Evaluation: return "evaluation";
        case ErrorCode::Parse: return "parse";
    }
    return "unknown";
}

}  // namespace hpmod
