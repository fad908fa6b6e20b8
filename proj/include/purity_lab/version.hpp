#pragma once

namespace purity_lab {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kReportSchema = "purity-lab/1";

} // namespace purity_lab
