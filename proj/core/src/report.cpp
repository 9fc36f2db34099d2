#include "ttoent/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ttoent/errors.hpp"
#include "ttoent/version.hpp"

namespace ttoent {

std::string format_field(const FieldValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  if (const auto* d = std::get_if<double>(&value)) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", *d);
    return buf;
  }
  if (const auto* l = std::get_if<long>(&value)) return std::to_string(*l);
  return std::get<bool>(value) ? "true" : "false";
}

namespace {

std::string format_double(double d) { return format_field(FieldValue{d}); }

std::vector<std::string> parameter_columns(const std::vector<ResultRecord>& records) {
  std::vector<std::string> cols;
  for (const auto& rec : records)
    for (const auto& [name, value] : rec.parameters)
      if (std::find(cols.begin(), cols.end(), name) == cols.end()) cols.push_back(name);
  return cols;
}

std::string parameter_value(const ResultRecord& rec, const std::string& name) {
  for (const auto& [key, value] : rec.parameters)
    if (key == name) return format_field(value);
  return "";
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  const std::vector<std::string> params = parameter_columns(records);
  os << "command";
  for (const auto& p : params) os << ',' << p;
  os << ",E_F,exact_eof,abs_error,K0,K,M,evaluations,wall_time_seconds,converged,seed,"
        "artifact_version\n";
  for (const auto& rec : records) {
    os << rec.command;
    for (const auto& p : params) os << ',' << parameter_value(rec, p);
    os << ',' << format_double(rec.eof_bits);
    if (rec.exact_eof) {
      os << ',' << format_double(*rec.exact_eof) << ','
         << format_double(std::abs(rec.eof_bits - *rec.exact_eof));
    } else {
      os << ",,";
    }
    os << ',' << rec.k0 << ',' << rec.k << ',' << rec.m << ',' << rec.evaluations << ',';
    if (rec.wall_time_seconds) os << format_double(*rec.wall_time_seconds);
    os << ',' << (rec.converged ? "true" : "false") << ',' << rec.seed << ','
       << kArtifactVersion << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<ResultRecord>& records) {
  auto json_escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out;
  };
  os << "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    os << "  {\"command\": \"" << json_escape(rec.command) << "\"";
    for (const auto& [name, value] : rec.parameters) {
      os << ", \"" << json_escape(name) << "\": ";
      if (std::holds_alternative<std::string>(value))
        os << '"' << json_escape(std::get<std::string>(value)) << '"';
      else
        os << format_field(value);
    }
    os << ", \"E_F\": " << format_double(rec.eof_bits);
    if (rec.exact_eof) {
      os << ", \"exact_eof\": " << format_double(*rec.exact_eof);
      os << ", \"abs_error\": " << format_double(std::abs(rec.eof_bits - *rec.exact_eof));
    }
    os << ", \"K0\": " << rec.k0 << ", \"K\": " << rec.k << ", \"M\": " << rec.m
       << ", \"evaluations\": " << rec.evaluations;
    if (rec.wall_time_seconds)
      os << ", \"wall_time_seconds\": " << format_double(*rec.wall_time_seconds);
    os << ", \"converged\": " << (rec.converged ? "true" : "false") << ", \"seed\": " << rec.seed
       << ", \"artifact_version\": \"" << kArtifactVersion << "\"}";
    os << (i + 1 < records.size() ? ",\n" : "\n");
  }
  os << "]\n";
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(text);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!text.empty() && text.back() == ',') fields.emplace_back();
    return fields;
  };
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      table.header = split(line);
      first = false;
    } else {
      table.rows.push_back(split(line));
    }
  }
  return table;
}

std::vector<double> parse_value_grid(const std::string& text) {
  if (text.empty()) throw InvalidInputError("empty value list");
  auto parse_one = [](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw InvalidInputError("malformed number '" + s + "'");
    }
    if (pos != s.size()) throw InvalidInputError("malformed number '" + s + "'");
    return v;
  };

  std::vector<double> values;
  std::stringstream ss(text);
  std::string chunk;
  while (std::getline(ss, chunk, ',')) {
    if (chunk.empty()) throw InvalidInputError("empty entry in value list");
    const auto c1 = chunk.find(':');
    if (c1 == std::string::npos) {
      values.push_back(parse_one(chunk));
      continue;
    }
    const auto c2 = chunk.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw InvalidInputError("range must be lo:hi:step, got '" + chunk + "'");
    const double lo = parse_one(chunk.substr(0, c1));
    const double hi = parse_one(chunk.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_one(chunk.substr(c2 + 1));
    if (step <= 0.0 || hi < lo)
      throw InvalidInputError("range must have hi >= lo and step > 0, got '" + chunk + "'");
    for (double v = lo; v <= hi + step * 1e-9; v += step) values.push_back(v);
  }
  if (values.empty()) throw InvalidInputError("empty value list");
  return values;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ttoent
