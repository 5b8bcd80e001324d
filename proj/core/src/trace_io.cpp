#include "acofi/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "acofi/errors.hpp"

namespace acofi {

const char* kTraceHeader = "t,px,py,theta,action,policy,l,Q,R,err,q,B,Vnext";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp + " for writing");
    f << content;
    if (!f) throw IoError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename " + tmp + " to " + path);
}

std::string format_step_record(const StepRecord& rec) {
  std::string out;
  out += std::to_string(rec.t);
  out += ',';
  out += format_double(rec.state.px);
  out += ',';
  out += format_double(rec.state.py);
  out += ',';
  out += format_double(rec.state.theta);
  out += ',';
  out += std::to_string(static_cast<int>(rec.action));
  out += ',';
  out += rec.policy_used == PolicyTag::Task ? "task" : "safe";
  out += ',';
  out += format_double(rec.l_t);
  out += ',';
  out += format_double(rec.q_theta);
  out += ',';
  out += format_double(rec.r_t);
  out += ',';
  out += std::to_string(rec.err_t);
  out += ',';
  out += format_double(rec.quantile_t);
  out += ',';
  out += format_double(rec.b_t);
  out += ',';
  out += format_double(rec.v_next);
  return out;
}

void write_trace_csv(const std::vector<StepRecord>& trace,
                     const std::string& path) {
  std::string content(kTraceHeader);
  content += '\n';
  for (const StepRecord& rec : trace) {
    content += format_step_record(rec);
    content += '\n';
  }
  atomic_write(path, content);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const std::string& ctx) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw MalformedTrace("bad numeric field '" + s + "' in " + ctx);
  return v;
}

}  // namespace

std::vector<StepRecord> read_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw MalformedTrace(path + ": empty file");
  if (line != kTraceHeader)
    throw MalformedTrace(path + ": unexpected header '" + line + "'");
  std::vector<StepRecord> trace;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 13)
      throw MalformedTrace(path + ":" + std::to_string(lineno) +
                           ": expected 13 fields, got " +
                           std::to_string(fields.size()));
    std::string ctx = path + ":" + std::to_string(lineno);
    StepRecord rec;
    rec.t = static_cast<std::int64_t>(parse_double(fields[0], ctx));
    rec.state.px = parse_double(fields[1], ctx);
    rec.state.py = parse_double(fields[2], ctx);
    rec.state.theta = parse_double(fields[3], ctx);
    int a = static_cast<int>(parse_double(fields[4], ctx));
    if (a < -1 || a > 1)
      throw MalformedTrace(ctx + ": action out of range");
    rec.action = static_cast<Action>(a);
    if (fields[5] == "task") rec.policy_used = PolicyTag::Task;
    else if (fields[5] == "safe") rec.policy_used = PolicyTag::Safe;
    else throw MalformedTrace(ctx + ": unknown policy tag '" + fields[5] + "'");
    rec.l_t = parse_double(fields[6], ctx);
    rec.q_theta = parse_double(fields[7], ctx);
    rec.r_t = parse_double(fields[8], ctx);
    int err = static_cast<int>(parse_double(fields[9], ctx));
    if (err != 0 && err != 1) throw MalformedTrace(ctx + ": err must be 0/1");
    rec.err_t = err;
    rec.quantile_t = parse_double(fields[10], ctx);
    rec.b_t = parse_double(fields[11], ctx);
    rec.v_next = parse_double(fields[12], ctx);
    trace.push_back(rec);
  }
  return trace;
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path) {
  std::string content =
      "policy,scenario,n_runs,success_rate,mean_goal_reaches,mean_min_v,"
      "mean_unsafe_steps,mean_violation_steps,mean_safe_policy_steps,"
      "mean_total_steps,unsafe_ratio,safe_policy_ratio\n";
  for (const SummaryRow& r : rows) {
    content += policy_name(r.policy);
    content += ',';
    content += scenario_name(r.scenario);
    content += ',';
    content += std::to_string(r.n_runs);
    content += ',';
    content += format_double(r.success_rate);
    content += ',';
    content += format_double(r.mean_goal_reaches);
    content += ',';
    content += format_double(r.mean_min_v);
    content += ',';
    content += format_double(r.mean_unsafe_steps);
    content += ',';
    content += format_double(r.mean_violation_steps);
    content += ',';
    content += format_double(r.mean_safe_policy_steps);
    content += ',';
    content += format_double(r.mean_total_steps);
    content += ',';
    content += ratio_cell(r.mean_unsafe_steps, r.mean_total_steps);
    content += ',';
    content += ratio_cell(r.mean_safe_policy_steps, r.mean_total_steps);
    content += '\n';
  }
  atomic_write(path, content);
}

void write_verification_report(
    const std::vector<std::pair<std::string, std::string>>& entries,
    const std::string& path) {
  std::string content;
  for (const auto& [key, value] : entries) {
    content += key;
    content += " = ";
    content += value;
    content += '\n';
  }
  atomic_write(path, content);
}

void export_plot_data(const std::vector<StepRecord>& trace, double epsilon,
                      const std::string& path) {
  std::string content = "t\tV\tB\tepsilon\tpolicy\n";
  for (const StepRecord& rec : trace) {
    content += std::to_string(rec.t);
    content += '\t';
    content += format_double(rec.v_next);
    content += '\t';
    content += format_double(rec.b_t);
    content += '\t';
    content += format_double(epsilon);
    content += '\t';
    content += rec.policy_used == PolicyTag::Task ? "task" : "safe";
    content += '\n';
  }
  atomic_write(path, content);
}

}  // namespace acofi
