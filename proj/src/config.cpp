// SPDX-License-Identifier: Apache-2.0

#include "rhs/harness.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rhs::harness {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos)
      break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

// Flat "section.key" -> value map that remembers source lines.
class Document {
public:
  explicit Document(std::string_view text) {
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto end = text.find('\n', pos);
      std::string_view line = text.substr(pos, end == std::string_view::npos ? end : end - pos);
      pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
      ++line_no;

      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      line = trim(line);
      if (line.empty())
        continue;

      if (line.front() == '[') {
        if (line.back() != ']')
          throw ParseError(std::string(line), line_no, "unterminated section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (section.empty())
          throw ParseError("", line_no, "empty section name");
        sections_.insert(section);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ParseError(std::string(line), line_no, "expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      if (key.empty())
        throw ParseError("", line_no, "missing key before '='");
      if (section.empty())
        throw ParseError(key, line_no, "key appears before any [section]");
      const std::string full = section + "." + key;
      if (entries_.count(full))
        throw ParseError(full, line_no,
                         "duplicate key (first set on line " +
                             std::to_string(entries_.at(full).line) + ")");
      entries_[full] = {std::string(trim(line.substr(eq + 1))), line_no, false};
      order_.push_back(full);
    }
  }

  bool has_section(const std::string &name) const { return sections_.count(name) > 0; }

  Entry *find(const std::string &key) {
    auto it = entries_.find(key);
    if (it == entries_.end())
      return nullptr;
    it->second.used = true;
    return &it->second;
  }

  // Keys of one section in document order; marks them used.
  std::vector<std::pair<std::string, Entry *>> section(const std::string &name) {
    std::vector<std::pair<std::string, Entry *>> out;
    const std::string prefix = name + ".";
    for (const auto &full : order_)
      if (full.rfind(prefix, 0) == 0) {
        auto &e = entries_.at(full);
        e.used = true;
        out.emplace_back(full.substr(prefix.size()), &e);
      }
    return out;
  }

  void reject_unused() const {
    for (const auto &full : order_) {
      const auto &e = entries_.at(full);
      if (!e.used)
        throw ParseError(full, e.line, "unknown key");
    }
  }

private:
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::set<std::string> sections_;
};

double to_double(std::string_view text, const std::string &key, std::size_t line) {
  text = trim(text);
  double value = 0.0;
  const auto *end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(value))
    throw ParseError(key, line, "expected a finite number, got '" + std::string(text) + "'");
  return value;
}

std::uint64_t to_uint(std::string_view text, const std::string &key, std::size_t line) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto *end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != end)
    throw ParseError(key, line, "expected a non-negative integer, got '" + std::string(text) + "'");
  return value;
}

bool to_bool(std::string_view text, const std::string &key, std::size_t line) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "on" || text == "1")
    return true;
  if (text == "false" || text == "no" || text == "off" || text == "0")
    return false;
  throw ParseError(key, line, "expected true or false, got '" + std::string(text) + "'");
}

// "a, b, c" or "start:stop:step" (inclusive of stop within half a step).
std::vector<double> to_list(std::string_view text, const std::string &key, std::size_t line) {
  text = trim(text);
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw ParseError(key, line, "range must be start:stop:step");
    const double start = to_double(parts[0], key, line);
    const double stop = to_double(parts[1], key, line);
    const double step = to_double(parts[2], key, line);
    if (!(step > 0.0) || stop < start)
      throw ParseError(key, line, "range needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5));
    for (std::size_t i = 0; i <= n; ++i)
      out.push_back(start + step * static_cast<double>(i));
    return out;
  }
  std::vector<double> out;
  for (auto item : split(text, ','))
    out.push_back(to_double(item, key, line));
  return out;
}

channel::Point to_point(std::string_view text, const std::string &key, std::size_t line) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw ParseError(key, line, "expected a point '(x, y)', got '" + std::string(text) + "'");
  const auto parts = split(text.substr(1, text.size() - 2), ',');
  if (parts.size() != 2)
    throw ParseError(key, line, "a point has exactly two coordinates");
  return {to_double(parts[0], key, line), to_double(parts[1], key, line)};
}

std::vector<channel::Point> to_points(std::string_view text, const std::string &key,
                                      std::size_t line) {
  std::vector<channel::Point> out;
  for (auto item : split(text, ';'))
    out.push_back(to_point(item, key, line));
  return out;
}

} // namespace

SchemeSpec SchemeSpec::parse(std::string_view text) {
  text = trim(text);
  SchemeSpec spec;
  spec.name = std::string(text);
  std::string_view head = text;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    head = text.substr(0, colon);
    const auto idx = text.substr(colon + 1);
    std::size_t value = 0;
    const auto res = std::from_chars(idx.data(), idx.data() + idx.size(), value);
    if (idx.empty() || res.ec != std::errc{} || res.ptr != idx.data() + idx.size())
      throw ParseError("schemes", 0, "bad mask index in scheme '" + spec.name + "'");
    spec.mask_index = value;
  }
  if (head == "adaptive") {
    spec.kind = Kind::adaptive;
    if (head.size() != text.size())
      throw ParseError("schemes", 0, "the adaptive scheme takes no mask index");
  } else if (head == "fixed") {
    spec.kind = Kind::fixed;
  } else if (head == "zf_random" || head == "zf") {
    spec.kind = Kind::zf_random;
  } else if (head.rfind("quantized-", 0) == 0 && head.size() > 13 &&
             head.substr(head.size() - 3) == "bit") {
    const auto digits = head.substr(10, head.size() - 13);
    unsigned bits = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), bits);
    if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || bits < 1 || bits > 30)
      throw ParseError("schemes", 0, "bad bit count in scheme '" + spec.name + "'");
    spec.kind = Kind::quantized;
    spec.bits = bits;
  } else {
    throw ParseError("schemes", 0, "unknown scheme '" + spec.name + "'");
  }
  return spec;
}

std::vector<SchemeSpec> parse_scheme_list(std::string_view text) {
  std::vector<SchemeSpec> out;
  std::set<std::string> seen;
  for (auto item : split(text, ',')) {
    if (item.empty())
      throw ParseError("schemes", 0, "empty scheme name");
    auto spec = SchemeSpec::parse(item);
    if (!seen.insert(spec.name).second)
      throw ParseError("schemes", 0, "scheme '" + spec.name + "' listed twice");
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<SchemeSpec> default_schemes() {
  return parse_scheme_list("adaptive, fixed, quantized-2bit, zf_random");
}

void SimConfig::validate() const {
  if (dims.surfaces == 0)
    throw ParseError("dims.S", 0, "must be >= 1");
  if (dims.users == 0)
    throw ParseError("dims.K", 0, "must be >= 1");
  if (grid.rows == 0 || grid.cols == 0)
    throw ParseError("dims.M_x", 0, "grid dimensions must be >= 1");
  if (dims.elements != grid.size())
    throw ParseError("dims", 0, "element count must equal M_x * M_y");
  if (dims.antennas == 0)
    throw ParseError("dims.N_tr", 0, "must be >= 1");
  if (layout.rhs_positions.size() != dims.surfaces)
    throw ParseError("layout.rhs", 0, "expected " + std::to_string(dims.surfaces) + " positions");
  if (!layout.ue_positions.empty() && layout.ue_positions.size() != dims.users)
    throw ParseError("layout.ue", 0, "expected " + std::to_string(dims.users) + " positions");
  try {
    layout.validate();
  } catch (const DomainError &e) {
    throw ParseError("layout", 0, e.what());
  }
  try {
    path_loss.validate();
  } catch (const DomainError &e) {
    throw ParseError("channel", 0, e.what());
  }
  if (p_max_dbm.empty())
    throw ParseError("power.p_max_dbm", 0, "needs at least one value");
  if (!weights.empty() && weights.size() != dims.users)
    throw ParseError("power.weights", 0, "expected " + std::to_string(dims.users) + " weights");
  for (double w : weights)
    if (!(w >= 0.0))
      throw ParseError("power.weights", 0, "weights must be non-negative");
  if (catalog.empty())
    throw ParseError("catalog", 0, "at least one shape is required");
  if (schemes.empty())
    throw ParseError("run.schemes", 0, "at least one scheme is required");
  for (const auto &s : schemes)
    if (s.kind != SchemeSpec::Kind::adaptive && s.mask_index >= catalog.size())
      throw ParseError("run.schemes", 0, "scheme '" + s.name + "' refers to a missing shape");
  if (trials == 0)
    throw ParseError("run.trials", 0, "must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0))
    throw ParseError("solver.eta", 0, "must lie in (0, 1]");
  if (!(tol_outer > 0.0) || !(passive.tol > 0.0))
    throw ParseError("solver", 0, "tolerances must be positive");
  if (dims.users > dims.antennas)
    for (const auto &s : schemes)
      if (s.kind == SchemeSpec::Kind::zf_random)
        throw ParseError("run.schemes", 0, "zero-forcing needs K <= N_tr");
  try {
    (void)build_catalog();
  } catch (const DomainError &e) {
    throw ParseError("catalog", 0, e.what());
  }
}

shapes::ShapeCatalog SimConfig::build_catalog() const {
  std::vector<shapes::ShapeMask> masks;
  for (const auto &entry : catalog)
    masks.push_back(shapes::make_mask(entry.spec, grid, entry.label));
  return shapes::ShapeCatalog(std::move(masks));
}

ao::AOConfig SimConfig::ao_config(double p_max, std::uint64_t seed_value) const {
  ao::AOConfig cfg;
  cfg.p_max = channel::dbm_to_watts(p_max);
  cfg.p_thr = p_thr_dbm ? channel::dbm_to_watts(*p_thr_dbm) : 0.0;
  if (!weights.empty())
    cfg.weights = Eigen::Map<const RVec>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  cfg.eta = eta;
  cfg.tol_outer = tol_outer;
  cfg.max_outer = max_outer;
  cfg.passive = passive;
  cfg.coupling = coupling;
  cfg.per_surface_masks = per_surface_masks;
  cfg.diagnostic_sinr = diagnostic_sinr;
  cfg.seed = seed_value;
  return cfg;
}

SimConfig parse_config(std::string_view text) {
  Document doc(text);
  SimConfig cfg;

  auto number = [&](const std::string &key, double &target) {
    if (auto *e = doc.find(key))
      target = to_double(e->value, key, e->line);
  };
  auto count = [&](const std::string &key, std::size_t &target) {
    if (auto *e = doc.find(key))
      target = static_cast<std::size_t>(to_uint(e->value, key, e->line));
  };
  auto flag = [&](const std::string &key, bool &target) {
    if (auto *e = doc.find(key))
      target = to_bool(e->value, key, e->line);
  };

  if (!doc.has_section("dims"))
    throw ParseError("dims", 0, "missing required section [dims]");
  for (const char *k : {"S", "K", "M_x", "M_y", "N_tr"})
    if (!doc.find(std::string("dims.") + k))
      throw ParseError(std::string("dims.") + k, 0, "missing required key");
  count("dims.S", cfg.dims.surfaces);
  count("dims.K", cfg.dims.users);
  count("dims.M_x", cfg.grid.rows);
  count("dims.M_y", cfg.grid.cols);
  count("dims.N_tr", cfg.dims.antennas);
  cfg.dims.elements = cfg.grid.size();

  if (auto *e = doc.find("layout.ap"))
    cfg.layout.ap_position = to_point(e->value, "layout.ap", e->line);
  if (auto *e = doc.find("layout.rhs"))
    cfg.layout.rhs_positions = to_points(e->value, "layout.rhs", e->line);
  else
    cfg.layout.rhs_positions = channel::NetworkLayout::default_rhs_positions(cfg.dims.surfaces);
  if (auto *e = doc.find("layout.ue"))
    cfg.layout.ue_positions = to_points(e->value, "layout.ue", e->line);
  if (auto *e = doc.find("layout.ue_center"))
    cfg.layout.ue_center = to_point(e->value, "layout.ue_center", e->line);
  number("layout.ue_radius", cfg.layout.ue_radius);
  number("layout.kappa", cfg.layout.path_loss_exponent);

  number("channel.rho_a", cfg.path_loss.rho_a);
  number("channel.rho_b", cfg.path_loss.rho_b);
  number("channel.sigma_delta", cfg.path_loss.sigma_delta);
  number("channel.noise_dbm", cfg.noise_dbm);

  if (auto *e = doc.find("power.p_max_dbm"))
    cfg.p_max_dbm = to_list(e->value, "power.p_max_dbm", e->line);
  if (auto *e = doc.find("power.p_thr_dbm")) {
    if (trim(e->value) == "off")
      cfg.p_thr_dbm.reset();
    else
      cfg.p_thr_dbm = to_double(e->value, "power.p_thr_dbm", e->line);
  }
  if (auto *e = doc.find("power.weights"))
    cfg.weights = to_list(e->value, "power.weights", e->line);

  for (auto &[label, entry] : doc.section("catalog")) {
    try {
      cfg.catalog.push_back({label, shapes::ShapeSpec::parse(entry->value)});
    } catch (const DomainError &err) {
      throw ParseError("catalog." + label, entry->line, err.what());
    }
  }
  if (cfg.catalog.empty() && cfg.grid == shapes::Grid{10, 60}) {
    cfg.catalog.push_back({"rectangle", shapes::ShapeSpec::parse("rectangle(10,6)")});
    cfg.catalog.push_back({"strip", shapes::ShapeSpec::parse("strip_row(60)")});
  }

  if (auto *e = doc.find("run.schemes")) {
    try {
      cfg.schemes = parse_scheme_list(e->value);
    } catch (const ParseError &err) {
      throw ParseError("run.schemes", e->line, err.what());
    }
  } else {
    cfg.schemes = default_schemes();
  }
  count("run.trials", cfg.trials);
  if (auto *e = doc.find("run.seed"))
    cfg.seed = to_uint(e->value, "run.seed", e->line);
  count("run.threads", cfg.threads);
  flag("run.timing", cfg.timing);

  number("solver.tol_outer", cfg.tol_outer);
  count("solver.max_outer", cfg.max_outer);
  number("solver.qp_tol", cfg.passive.tol);
  count("solver.qp_max_iters", cfg.passive.max_iters);
  count("solver.penalty_rounds", cfg.passive.penalty_rounds);
  number("solver.penalty_initial", cfg.passive.penalty_initial);
  number("solver.penalty_growth", cfg.passive.penalty_growth);
  number("solver.eta", cfg.eta);
  if (auto *e = doc.find("solver.coupling")) {
    const auto v = trim(e->value);
    if (v == "all_users")
      cfg.coupling = active::Coupling::all_users;
    else if (v == "per_user")
      cfg.coupling = active::Coupling::per_user;
    else
      throw ParseError("solver.coupling", e->line, "expected all_users or per_user");
  }
  flag("solver.per_surface_masks", cfg.per_surface_masks);
  flag("solver.diagnostic_sinr", cfg.diagnostic_sinr);

  doc.reject_unused();
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

} // namespace rhs::harness
