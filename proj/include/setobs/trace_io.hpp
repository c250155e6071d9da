#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pipeline.hpp"

namespace setobs {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trace_header(Index n) {
  std::string h = "t";
  for (const char* g : {"x_true", "xhat", "lo", "hi"})
    for (Index i = 0; i < n; ++i) h += std::string(",") + g + "_" + std::to_string(i + 1);
  h += ",trP,vol,eps1,alpha,beta,gamma,mu,contained,skipped";
  return h;
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows, Index n) {
  os << trace_header(n) << '\n';
  for (const TraceRow& r : rows) {
    require(r.x_true.size() == n && r.xhat.size() == n && r.lo.size() == n && r.hi.size() == n,
            ErrorCode::invalid_dimension, "trace row size mismatch");
    os << format_double(r.t);
    for (const Vector* v : {&r.x_true, &r.xhat, &r.lo, &r.hi})
      for (Index i = 0; i < n; ++i) os << ',' << format_double((*v)(i));
    for (double v : {r.trP, r.vol, r.eps1, r.alpha, r.beta, r.gamma, r.mu}) os << ',' << format_double(v);
    os << ',' << (r.contained ? 1 : 0) << ',' << (r.skipped ? 1 : 0) << '\n';
  }
}

inline std::string trace_csv(const std::vector<TraceRow>& rows, Index n) {
  std::ostringstream os;
  write_trace_csv(os, rows, n);
  return os.str();
}

inline void emit_traces(const std::vector<TraceRow>& rows, Index n, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io_error, "cannot open " + path.string());
  write_trace_csv(f, rows, n);
  if (!f) fail(ErrorCode::io_error, "cannot write " + path.string());
}

struct ParsedTrace {
  Index n = 0;
  std::vector<TraceRow> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) fail(ErrorCode::schema_error, "bad number '" + s + "' in trace");
  return v;
}

inline ParsedTrace parse_traces(std::istream& is) {
  ParsedTrace p;
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::schema_error, "trace has no header");
  const auto head = split_csv_line(line);
  const std::size_t fixed = 10;  // t plus the nine scalar columns
  if (head.size() < fixed || (head.size() - fixed) % 4 != 0) fail(ErrorCode::schema_error, "bad trace header");
  p.n = static_cast<Index>((head.size() - fixed) / 4);
  if (line != trace_header(p.n)) fail(ErrorCode::schema_error, "unexpected trace header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != head.size()) fail(ErrorCode::schema_error, "trace row has wrong field count");
    TraceRow r;
    std::size_t c = 0;
    r.t = parse_double(f[c++]);
    for (Vector* v : {&r.x_true, &r.xhat, &r.lo, &r.hi}) {
      v->resize(p.n);
      for (Index i = 0; i < p.n; ++i) (*v)(i) = parse_double(f[c++]);
    }
    for (double* v : {&r.trP, &r.vol, &r.eps1, &r.alpha, &r.beta, &r.gamma, &r.mu}) *v = parse_double(f[c++]);
    auto flag = [&](const std::string& s) {
      if (s != "0" && s != "1") fail(ErrorCode::schema_error, "bad flag in trace");
      return s == "1";
    };
    r.contained = flag(f[c++]);
    r.skipped = flag(f[c++]);
    p.rows.push_back(std::move(r));
  }
  return p;
}

inline ParsedTrace parse_traces(const std::string& text) {
  std::istringstream is(text);
  return parse_traces(is);
}

// per-figure series: axis bounds, volume, and the planar shadow of each set
inline void emit_plot_data(const std::vector<TraceRow>& rows, const std::vector<Ellipsoid>& sets,
                           const std::vector<Index>& axes, const std::filesystem::path& dir, int points = 50) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) fail(ErrorCode::io_error, "cannot open " + (dir / name).string());
    return f;
  };
  const Index n = rows.empty() ? 0 : rows.front().x_true.size();
  {
    std::ofstream f = open("bounds.csv");
    f << 't';
    for (Index i = 0; i < n; ++i) f << ",x_" << i + 1 << ",lo_" << i + 1 << ",hi_" << i + 1;
    f << '\n';
    for (const TraceRow& r : rows) {
      f << format_double(r.t);
      for (Index i = 0; i < n; ++i)
        f << ',' << format_double(r.x_true(i)) << ',' << format_double(r.lo(i)) << ',' << format_double(r.hi(i));
      f << '\n';
    }
  }
  {
    std::ofstream f = open("volume.csv");
    f << "t,vol,trP\n";
    for (const TraceRow& r : rows) f << format_double(r.t) << ',' << format_double(r.vol) << ',' << format_double(r.trP) << '\n';
  }
  if (axes.size() == 2 && !sets.empty()) {
    require(sets.size() == rows.size(), ErrorCode::invalid_parameter, "sets and rows differ in length");
    std::ofstream f = open("projection.csv");
    f << "step,t,point,u,v,u_true,v_true\n";
    for (std::size_t k = 0; k < sets.size(); ++k) {
      const auto poly = boundary_polyline(project(sets[k], axes), points);
      const double ut = rows[k].x_true(axes[0]), vt = rows[k].x_true(axes[1]);
      for (std::size_t p = 0; p < poly.size(); ++p)
        f << k << ',' << format_double(rows[k].t) << ',' << p << ',' << format_double(poly[p](0)) << ','
          << format_double(poly[p](1)) << ',' << format_double(ut) << ',' << format_double(vt) << '\n';
    }
  }
}

}  // namespace setobs
