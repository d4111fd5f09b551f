#pragma once

#include <ostream>
#include <string>

namespace itwa::cli {

inline constexpr const char* kRunCsvHeader = "tau,observable,value,stderr,ess,n_traj";
inline constexpr const char* kOracleCsvHeader = "tau,observable,value,stderr,ess,n_traj,method";
inline constexpr const char* kSweepCsvHeader = "param,value,stderr";

/// Scientific notation, 12 significant digits, '.' decimal point, "inf"/"nan" spelled out.
std::string format_number(double x);

}  // namespace itwa::cli
