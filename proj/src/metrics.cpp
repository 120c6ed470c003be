#include "ilpsched/metrics.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ilpsched/text.hpp"

namespace ilpsched {

ExperimentSummary summarize(std::span<const QuantumRecord> records,
                            PolicyKind policy) {
  if (records.empty()) {
    throw SchedError(Errc::empty_input, "no quantum records to summarize");
  }
  ExperimentSummary summary;
  summary.policy = policy;
  summary.quanta = static_cast<std::uint32_t>(records.size());
  for (const QuantumRecord& r : records) {
    summary.mean_imbalance += r.imbalance;
    summary.mean_utilization += r.utilization;
    summary.mean_oversubscription += r.oversubscription;
    summary.total_retired += r.total_retired;
  }
  summary.mean_imbalance /= summary.quanta;
  summary.mean_utilization /= summary.quanta;
  summary.mean_oversubscription /= summary.quanta;
  return summary;
}

void write_csv(std::span<const QuantumRecord> records, std::ostream& out) {
  const std::size_t k = records.empty() ? 0 : records[0].per_processor_demand.size();
  out << "quantum_index";
  for (std::size_t p = 0; p < k; ++p) out << ",demand_p" << p;
  for (std::size_t p = 0; p < k; ++p) out << ",achieved_p" << p;
  out << ",imbalance,oversubscription,total_retired,utilization\n";
  for (const QuantumRecord& r : records) {
    out << r.quantum_index;
    for (const double d : r.per_processor_demand) out << ',' << format_double(d);
    for (const double a : r.per_processor_achieved) out << ',' << format_double(a);
    out << ',' << format_double(r.imbalance) << ','
        << format_double(r.oversubscription) << ','
        << format_double(r.total_retired) << ',' << format_double(r.utilization)
        << '\n';
  }
  if (!out) throw SchedError(Errc::io_error, "CSV write failure");
}

void write_csv(std::span<const ExperimentSummary> summaries, std::ostream& out) {
  out << "policy,mean_imbalance,mean_utilization,total_retired,"
         "mean_oversubscription,quanta\n";
  for (const ExperimentSummary& s : summaries) {
    out << policy_name(s.policy) << ',' << format_double(s.mean_imbalance) << ','
        << format_double(s.mean_utilization) << ','
        << format_double(s.total_retired) << ','
        << format_double(s.mean_oversubscription) << ',' << s.quanta << '\n';
  }
  if (!out) throw SchedError(Errc::io_error, "CSV write failure");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double field_as_double(const std::string& field, std::size_t line_number) {
  const auto value = parse_double(field);
  if (!value) {
    throw SchedError(Errc::parse_error, "line " + std::to_string(line_number) +
                                            ": bad real '" + field + "'");
  }
  return *value;
}

}  // namespace

std::vector<QuantumRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw SchedError(Errc::parse_error, "missing CSV header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_fields(line);
  std::size_t k = 0;
  while (1 + k < header.size() && header[1 + k] == "demand_p" + std::to_string(k)) {
    ++k;
  }
  if (header.size() != 2 * k + 5 || header[0] != "quantum_index") {
    throw SchedError(Errc::parse_error, "unrecognized CSV header");
  }

  std::vector<QuantumRecord> records;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 2 * k + 5) {
      throw SchedError(Errc::parse_error, "line " + std::to_string(line_number) +
                                              ": wrong field count");
    }
    QuantumRecord r;
    const auto index = parse_u64(fields[0]);
    if (!index) {
      throw SchedError(Errc::parse_error, "line " + std::to_string(line_number) +
                                              ": bad quantum index");
    }
    r.quantum_index = static_cast<std::uint32_t>(*index);
    std::size_t f = 1;
    for (std::size_t p = 0; p < k; ++p) {
      r.per_processor_demand.push_back(field_as_double(fields[f++], line_number));
    }
    for (std::size_t p = 0; p < k; ++p) {
      r.per_processor_achieved.push_back(field_as_double(fields[f++], line_number));
    }
    r.imbalance = field_as_double(fields[f++], line_number);
    r.oversubscription = field_as_double(fields[f++], line_number);
    r.total_retired = field_as_double(fields[f++], line_number);
    r.utilization = field_as_double(fields[f++], line_number);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace ilpsched
