#pragma once

#include <string>
#include <vector>

#include "acofi/harness.hpp"

namespace acofi {

// Fixed trace CSV column order:
//   t,px,py,theta,action,policy,l,Q,R,err,q,B,Vnext
// Doubles are written as %.17g so values round-trip exactly; infinities are
// written as the literals "inf" / "-inf".
extern const char* kTraceHeader;

std::string format_step_record(const StepRecord& rec);

void write_trace_csv(const std::vector<StepRecord>& trace,
                     const std::string& path);
std::vector<StepRecord> read_trace_csv(const std::string& path);

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path);

// Machine-readable verification report: key = value lines.
void write_verification_report(
    const std::vector<std::pair<std::string, std::string>>& entries,
    const std::string& path);

// Plot-data export: columns (t, V, B, epsilon, policy), tab separated.
void export_plot_data(const std::vector<StepRecord>& trace, double epsilon,
                      const std::string& path);

// Write content to path atomically (temp file then rename).
void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v);

}  // namespace acofi
