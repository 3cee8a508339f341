#pragma once

#include <string>

namespace nlslab {

// Direction of a time limit (t → ±∞) or of a gauge twist.
enum class Sign { plus = 1, minus = -1 };

inline double value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }
inline Sign flip(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline std::string to_string(Sign s) { return s == Sign::plus ? "+" : "-"; }

}  // namespace nlslab
