#pragma once

#include <string>

namespace cubic {

// Factorisation type of (p) in a cubic field:
// T1 = p1 p2 p3, T2 = p1 p2, T3 = p1, T4 = p1^2 p2, T5 = p1^3.
enum class SplittingType { T1 = 1, T2, T3, T4, T5 };

constexpr SplittingType kAllTypes[5] = {SplittingType::T1, SplittingType::T2, SplittingType::T3,
                                        SplittingType::T4, SplittingType::T5};

inline int type_index(SplittingType t) { return static_cast<int>(t) - 1; }
inline std::string type_name(SplittingType t) { return "T" + std::to_string(static_cast<int>(t)); }

// Accepts "T1".."T5" or "1".."5"; throws Validation otherwise.
SplittingType parse_type(const std::string& s);

}  // namespace cubic
