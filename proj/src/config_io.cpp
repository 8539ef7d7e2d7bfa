#include "psc/config_io.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <vector>

namespace psc {

namespace {

std::string trim(const std::string& s) {
  std::size_t first = 0;
  std::size_t last = s.size();
  while (first < last && std::isspace(static_cast<unsigned char>(s[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(s[last - 1]))) --last;
  return s.substr(first, last - first);
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty() || s[0] == '-') return false;
  try {
    std::size_t pos = 0;
    out = std::stoull(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_size(const std::string& s, std::size_t& out) {
  std::uint64_t v = 0;
  if (!parse_u64(s, v)) return false;
  out = static_cast<std::size_t>(v);
  return true;
}

// Splits "segment.<n>.<s>" into 1-based user and segment numbers.
bool parse_segment_key(const std::string& key, std::size_t& user, std::size_t& segment) {
  const std::string prefix = "segment.";
  if (key.rfind(prefix, 0) != 0) return false;
  const std::string rest = key.substr(prefix.size());
  const auto dot = rest.find('.');
  if (dot == std::string::npos) return false;
  if (!parse_size(rest.substr(0, dot), user) || !parse_size(rest.substr(dot + 1), segment))
    return false;
  return user >= 1 && segment >= 1;
}

bool parse_segment_value(const std::string& value, LoadSegment& seg) {
  std::vector<std::string> parts;
  std::stringstream stream(value);
  std::string part;
  while (std::getline(stream, part, ',')) parts.push_back(trim(part));
  if (parts.size() != 3) return false;
  return parse_double(parts[0], seg.slope) && parse_double(parts[1], seg.intercept) &&
         parse_double(parts[2], seg.lower);
}

}  // namespace

Bundle parse_config(std::istream& in, const std::string& source_name) {
  Bundle bundle;
  std::vector<std::string> issues;
  std::map<std::pair<std::size_t, std::size_t>, LoadSegment> segment_lines;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto where = [&] { return source_name + ":" + std::to_string(line_no); };

    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back(where() + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    auto bad_value = [&](const std::string& expected) {
      issues.push_back(where() + ": '" + key + "' expects " + expected + ", got '" + value + "'");
    };

    std::size_t user = 0;
    std::size_t segment = 0;
    double d = 0.0;
    if (key == "num_users") {
      if (parse_size(value, bundle.config.num_users)) continue;
      bad_value("a positive integer");
    } else if (key == "num_antennas") {
      if (parse_size(value, bundle.config.num_antennas)) continue;
      bad_value("a positive integer");
    } else if (key == "channel_gain_db") {
      if (parse_double(value, bundle.config.channel_gain_db)) continue;
      bad_value("a number");
    } else if (key == "noise_power_dbm") {
      if (parse_double(value, bundle.config.noise_power_dbm)) continue;
      bad_value("a number");
    } else if (key == "comp_power_coeff") {
      if (parse_double(value, bundle.config.comp_power_coeff)) continue;
      bad_value("a number");
    } else if (key == "max_power_dbm") {
      if (parse_double(value, d)) {
        bundle.config.max_power_dbm = {d};
        continue;
      }
      bad_value("a number");
    } else if (key == "seed") {
      if (parse_u64(value, bundle.config.rng_seed)) continue;
      bad_value("an unsigned integer");
    } else if (key == "delta") {
      if (parse_double(value, bundle.solver.delta)) continue;
      bad_value("a number");
    } else if (key == "tau_bar") {
      if (parse_double(value, bundle.solver.tau_bar)) continue;
      bad_value("a number");
    } else if (key == "alpha") {
      if (parse_double(value, bundle.solver.alpha)) continue;
      bad_value("a number");
    } else if (key == "xi") {
      if (parse_double(value, bundle.solver.xi)) continue;
      bad_value("a number");
    } else if (key == "epsilon") {
      if (parse_double(value, bundle.solver.epsilon)) continue;
      bad_value("a number");
    } else if (key == "t_max") {
      if (parse_size(value, bundle.solver.t_max)) continue;
      bad_value("a positive integer");
    } else if (key == "i_max") {
      if (parse_size(value, bundle.solver.i_max)) continue;
      bad_value("a positive integer");
    } else if (key == "b_max") {
      if (parse_size(value, bundle.solver.b_max)) continue;
      bad_value("a positive integer");
    } else if (parse_segment_key(key, user, segment)) {
      LoadSegment seg;
      if (!parse_segment_value(value, seg)) {
        bad_value("'A,B,L' with three numbers");
        continue;
      }
      if (!segment_lines.emplace(std::make_pair(user, segment), seg).second)
        issues.push_back(where() + ": duplicate segment '" + key + "'");
    } else {
      issues.push_back(where() + ": unknown key '" + key + "'");
    }
  }

  if (segment_lines.empty()) {
    if (issues.empty()) bundle.load = default_piecewise_load(bundle.config);
  } else {
    std::size_t max_user = 0;
    for (const auto& [id, seg] : segment_lines) max_user = std::max(max_user, id.first);
    bundle.load.users.assign(max_user, {});
    for (std::size_t user_no = 1; user_no <= max_user; ++user_no) {
      std::vector<LoadSegment> segments;
      for (std::size_t seg_no = 1;; ++seg_no) {
        const auto it = segment_lines.find({user_no, seg_no});
        if (it == segment_lines.end()) break;
        segments.push_back(it->second);
      }
      std::size_t declared = 0;
      for (const auto& [id, seg] : segment_lines)
        if (id.first == user_no) ++declared;
      if (declared == 0) {
        issues.push_back(source_name + ": user " + std::to_string(user_no) +
                         " has no segment lines but a later user does");
      } else if (segments.size() != declared) {
        issues.push_back(source_name + ": segment numbers for user " + std::to_string(user_no) +
                         " must be contiguous starting at 1");
      }
      bundle.load.users[user_no - 1] = std::move(segments);
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
  return bundle;
}

Bundle load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"cannot open config file: '" + path + "'"});
  return parse_config(in, path);
}

}  // namespace psc
