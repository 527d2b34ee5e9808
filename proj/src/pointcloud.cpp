#include "panolidar/pointcloud.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "panolidar/error.hpp"

namespace panolidar {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    fn(text.substr(start, end - start));
    start = end + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::uint16_t> parse_u16(std::string_view s) {
  const auto v = parse_double(s);
  if (!v || !std::isfinite(*v) || *v < 0.0 || *v > 65535.0 || std::floor(*v) != *v) return std::nullopt;
  return static_cast<std::uint16_t>(*v);
}

bool finite_xyz(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void accept(PointCloud& cloud, const Point3& p) {
  if (!finite_xyz(p)) {
    ++cloud.summary.malformed;
    return;
  }
  if (p.degenerate()) ++cloud.summary.degenerate;
  ++cloud.summary.records;
  cloud.points.push_back(p);
}

std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw FileNotFound("no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string_view to_string(CloudFormat format) {
  switch (format) {
    case CloudFormat::Csv: return "csv";
    case CloudFormat::PcdAscii: return "pcd_ascii";
    case CloudFormat::RawF32: return "raw_f32";
  }
  return "csv";
}

std::optional<CloudFormat> parse_cloud_format(std::string_view name) {
  if (name == "csv") return CloudFormat::Csv;
  if (name == "pcd_ascii" || name == "pcd") return CloudFormat::PcdAscii;
  if (name == "raw_f32" || name == "raw") return CloudFormat::RawF32;
  return std::nullopt;
}

std::optional<CloudFormat> cloud_format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv" || ext == ".txt") return CloudFormat::Csv;
  if (ext == ".pcd") return CloudFormat::PcdAscii;
  if (ext == ".bin" || ext == ".f32" || ext == ".raw") return CloudFormat::RawF32;
  return std::nullopt;
}

PointCloud parse_csv(std::string_view text, std::string source) {
  PointCloud cloud;
  cloud.source = std::move(source);
  if (text.find('\0') != std::string_view::npos) {
    throw FormatMismatch(cloud.source + ": binary data in a csv input");
  }
  for_each_line(text, [&](std::string_view raw) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    if (line.starts_with("VERSION") || line.starts_with("FIELDS")) {
      throw FormatMismatch(cloud.source + ": PCD header found in a csv input");
    }
    const auto cols = split(line, ',');
    if (cols.size() != 3 && cols.size() != 6) {
      ++cloud.summary.malformed;
      return;
    }
    const auto x = parse_double(cols[0]);
    const auto y = parse_double(cols[1]);
    const auto z = parse_double(cols[2]);
    if (!x || !y || !z) {
      ++cloud.summary.malformed;
      return;
    }
    Point3 p{*x, *y, *z, {}, {}, {}};
    if (cols.size() == 6) {
      p.ambient = parse_u16(cols[3]);
      p.signal = parse_u16(cols[4]);
      p.reflectivity = parse_u16(cols[5]);
      if (!p.ambient || !p.signal || !p.reflectivity) {
        ++cloud.summary.malformed;
        return;
      }
    }
    accept(cloud, p);
  });
  return cloud;
}

PointCloud parse_pcd_ascii(std::string_view text, std::string source) {
  PointCloud cloud;
  cloud.source = std::move(source);
  if (trim(text).empty()) return cloud;

  std::vector<std::string> fields;
  bool in_data = false;
  int ix = -1, iy = -1, iz = -1, iamb = -1, isig = -1, iref = -1;

  for_each_line(text, [&](std::string_view raw) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    if (!in_data) {
      const auto tokens = split_ws(line);
      const auto key = tokens.front();
      if (key == "FIELDS") {
        fields.assign(tokens.begin() + 1, tokens.end());
        for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
          const auto& f = fields[static_cast<std::size_t>(i)];
          if (f == "x") ix = i;
          else if (f == "y") iy = i;
          else if (f == "z") iz = i;
          else if (f == "ambient") iamb = i;
          else if (f == "signal") isig = i;
          else if (f == "reflectivity") iref = i;
        }
      } else if (key == "DATA") {
        if (tokens.size() < 2 || tokens[1] != "ascii") {
          throw FormatMismatch(cloud.source + ": only DATA ascii is supported");
        }
        if (ix < 0 || iy < 0 || iz < 0) {
          throw FormatMismatch(cloud.source + ": FIELDS must include x y z");
        }
        in_data = true;
      } else if (key != "VERSION" && key != "SIZE" && key != "TYPE" && key != "COUNT" &&
                 key != "WIDTH" && key != "HEIGHT" && key != "VIEWPOINT" && key != "POINTS") {
        throw FormatMismatch(cloud.source + ": unexpected PCD header line '" + std::string(key) + "'");
      }
      return;
    }
    const auto cols = split_ws(line);
    if (cols.size() != fields.size()) {
      ++cloud.summary.malformed;
      return;
    }
    const auto x = parse_double(cols[static_cast<std::size_t>(ix)]);
    const auto y = parse_double(cols[static_cast<std::size_t>(iy)]);
    const auto z = parse_double(cols[static_cast<std::size_t>(iz)]);
    if (!x || !y || !z) {
      ++cloud.summary.malformed;
      return;
    }
    Point3 p{*x, *y, *z, {}, {}, {}};
    auto channel = [&](int idx) -> std::optional<std::uint16_t> {
      if (idx < 0) return std::nullopt;
      return parse_u16(cols[static_cast<std::size_t>(idx)]);
    };
    p.ambient = channel(iamb);
    p.signal = channel(isig);
    p.reflectivity = channel(iref);
    if ((iamb >= 0 && !p.ambient) || (isig >= 0 && !p.signal) || (iref >= 0 && !p.reflectivity)) {
      ++cloud.summary.malformed;
      return;
    }
    accept(cloud, p);
  });

  if (!in_data) throw FormatMismatch(cloud.source + ": PCD header has no DATA line");
  return cloud;
}

PointCloud parse_raw_f32(std::string_view bytes, std::string source) {
  static_assert(std::endian::native == std::endian::little, "raw_f32 reader assumes a little-endian host");
  PointCloud cloud;
  cloud.source = std::move(source);
  constexpr std::size_t kStride = 3 * sizeof(float);
  if (bytes.size() % kStride != 0) {
    throw FormatMismatch(cloud.source + ": size " + std::to_string(bytes.size()) +
                         " is not a multiple of 12 bytes");
  }
  cloud.points.reserve(bytes.size() / kStride);
  for (std::size_t off = 0; off < bytes.size(); off += kStride) {
    float xyz[3];
    std::memcpy(xyz, bytes.data() + off, kStride);
    accept(cloud, Point3{xyz[0], xyz[1], xyz[2], {}, {}, {}});
  }
  return cloud;
}

PointCloud parse_cloud(const std::filesystem::path& path, CloudFormat format) {
  const auto bytes = read_file(path);
  const auto source = path.string() + " (" + std::string(to_string(format)) + ")";
  switch (format) {
    case CloudFormat::Csv: return parse_csv(bytes, source);
    case CloudFormat::PcdAscii: return parse_pcd_ascii(bytes, source);
    case CloudFormat::RawF32: return parse_raw_f32(bytes, source);
  }
  throw FormatMismatch("unknown format");
}

std::string to_csv(const PointCloud& cloud) {
  const bool channels = !cloud.points.empty() &&
                        std::all_of(cloud.points.begin(), cloud.points.end(), [](const Point3& p) {
                          return p.ambient && p.signal && p.reflectivity;
                        });
  std::string out = channels ? "# x,y,z,ambient,signal,reflectivity\n" : "# x,y,z\n";
  char buf[128];
  for (const auto& p : cloud.points) {
    int n = std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", p.x, p.y, p.z);
    out.append(buf, static_cast<std::size_t>(n));
    if (channels) {
      n = std::snprintf(buf, sizeof(buf), ",%u,%u,%u", unsigned{*p.ambient}, unsigned{*p.signal},
                        unsigned{*p.reflectivity});
      out.append(buf, static_cast<std::size_t>(n));
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_csv(cloud);
  if (!out) throw IoError("write failed: " + path.string());
}

double horizontal_range(const Point3& p) { return std::sqrt(p.x * p.x + p.y * p.y); }

double euclidean_range(const Point3& p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

}  // namespace panolidar
