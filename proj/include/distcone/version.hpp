#ifndef DISTCONE_VERSION_HPP
#define DISTCONE_VERSION_HPP

namespace distcone {

inline constexpr const char* kToolName = "distcone";
inline constexpr const char* kToolVersion = "0.1.0";
// Bumped when any on-disk format changes incompatibly.
inline constexpr int kFormatVersion = 1;
// Identifies the random stream implementation embedded in artifacts.
inline constexpr const char* kGeneratorId = "xoshiro256ss-v1";

}  // namespace distcone

#endif  // DISTCONE_VERSION_HPP
