#include "qmx/error.hpp"

namespace qmx {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::PoleHit: return "PoleHit";
    case Errc::DenominatorPole: return "DenominatorPole";
    case Errc::EmptySector: return "EmptySector";
    case Errc::OutOfTruncation: return "OutOfTruncation";
    case Errc::OutOfBlock: return "OutOfBlock";
    case Errc::UnsupportedShape: return "UnsupportedShape";
    case Errc::TruncationTooSmall: return "TruncationTooSmall";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::UnknownRelation: return "UnknownRelation";
  }
  return "Unknown";
}

}  // namespace qmx
