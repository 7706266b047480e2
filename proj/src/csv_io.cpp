#include "patterndyn/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace patterndyn {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size(), ErrorCode::io, "bad number '" + std::string(s) + "'");
  return v;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size(), ErrorCode::io, "bad integer '" + s + "'");
  return v;
}

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::io, std::string("missing ") + what);
  return line;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const DistSpec& spec = data.spec;
  out << to_string(spec.kind) << ',' << spec.d << ',' << spec.k << ',' << format_double(spec.epsilon) << ','
      << data.seed << '\n';
  for (const auto& s : data.samples) {
    out << s.y << ',';
    for (std::size_t i = 0; i < s.key_slots.size(); ++i) out << (i ? ";" : "") << s.key_slots[i];
    for (Index j = 0; j < s.x.size(); ++j) out << ',' << format_double(s.x[j]);
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in, const DistSpec& spec) {
  const auto head = split(next_line(in, "dataset header"), ',');
  require(head.size() == 5, ErrorCode::io, "dataset header needs kind,d,k,epsilon,seed");
  require(parse_dist_kind(head[0]) == spec.kind && parse_int(head[1]) == spec.d && parse_int(head[2]) == spec.k &&
              parse_double(head[3]) == spec.epsilon,
          ErrorCode::io, "dataset header disagrees with the distribution");
  Dataset data{{}, spec, static_cast<std::uint64_t>(std::stoull(head[4]))};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    require(static_cast<Index>(cells.size()) == 2 + spec.input_dim(), ErrorCode::io, "dataset row of wrong width");
    LabeledSample s;
    s.y = static_cast<int>(parse_int(cells[0]));
    for (const auto& u : split(cells[1], ';')) s.key_slots.push_back(static_cast<Index>(parse_int(u)));
    s.x.resize(spec.input_dim());
    for (Index j = 0; j < spec.input_dim(); ++j) s.x[j] = parse_double(cells[static_cast<std::size_t>(j) + 2]);
    data.samples.push_back(std::move(s));
  }
  return data;
}

void write_bank_csv(std::ostream& out, const FilterBank& bank) {
  out << bank.h() << ',' << bank.d() << ',' << to_string(bank.mode) << '\n';
  for (Index i = 0; i < bank.h(); ++i) {
    out << format_double(bank.weights[i]);
    for (Index j = 0; j < bank.d(); ++j) out << ',' << format_double(bank.filters(i, j));
    out << '\n';
  }
}

FilterBank read_bank_csv(std::istream& in) {
  const auto head = split(next_line(in, "bank header"), ',');
  require(head.size() == 3, ErrorCode::io, "bank header needs h,d,mode");
  const Index h = parse_int(head[0]), d = parse_int(head[1]);
  require(h >= 1 && d >= 1, ErrorCode::io, "bank header with empty shape");
  Matrix w(h, d);
  Vector a(h);
  for (Index i = 0; i < h; ++i) {
    const auto cells = split(next_line(in, "bank row"), ',');
    require(static_cast<Index>(cells.size()) == d + 1, ErrorCode::io, "bank row of wrong width");
    a[i] = parse_double(cells[0]);
    for (Index j = 0; j < d; ++j) w(i, j) = parse_double(cells[static_cast<std::size_t>(j) + 1]);
  }
  return FilterBank::make(std::move(w), std::move(a), parse_mode(head[2]));
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRecord> records) {
  Index n_alpha = 0;
  if (!records.empty() && !records.front().filters.empty()) n_alpha = records.front().filters.front().alpha.size();
  out << "step,filter_id,a_i,norm";
  for (Index j = 1; j <= n_alpha; ++j) out << ",alpha_" << j;
  out << ",perp_norm,sin_theta,target_id\n";
  for (const auto& rec : records) {
    for (std::size_t i = 0; i < rec.filters.size(); ++i) {
      const auto& f = rec.filters[i];
      out << rec.step << ',' << i << ',' << format_double(f.a) << ',' << format_double(f.norm);
      for (Index j = 0; j < f.alpha.size(); ++j) out << ',' << format_double(f.alpha[j]);
      out << ',' << format_double(f.perp_norm) << ',' << format_double(f.sin_theta) << ',' << f.target_id << '\n';
    }
  }
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << bytes;
  out.flush();
  require(static_cast<bool>(out), ErrorCode::io, "write to " + path.string() + " failed");
}

}  // namespace patterndyn
