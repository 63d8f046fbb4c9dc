#pragma once

#include <stdexcept>
#include <string>

namespace voxmet {

// Base for every failure the library reports. Each condition gets its own
// type so callers can catch exactly what they can handle.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// volume container I/O
struct MissingFile : Error { using Error::Error; };
struct MalformedHeader : Error { using Error::Error; };
struct TruncatedData : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// geometry / indexing
struct IndexOutOfRange : Error { using Error::Error; };
struct RoiOutOfBounds : Error { using Error::Error; };

// JSON documents
struct MalformedDocument : Error { using Error::Error; };
struct UnknownClassIndex : Error { using Error::Error; };
struct InvalidBox : Error { using Error::Error; };

// phantom generation
struct PrimitiveOutOfBounds : Error { using Error::Error; };
struct OverlappingPrimitives : Error { using Error::Error; };

// fusion
struct MixedAxes : Error { using Error::Error; };

// segmentation
struct DimMismatch : Error { using Error::Error; };
struct DuplicateView : Error { using Error::Error; };
struct ScoreOutOfRange : Error { using Error::Error; };

// metrology
struct EmptyMask : Error { using Error::Error; };
struct EmptyContour : Error { using Error::Error; };
struct EmptyAfterCleanup : Error { using Error::Error; };

// metrics
struct UndefinedPrecision : Error { using Error::Error; };
struct NoGroundTruth : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };

}  // namespace voxmet
