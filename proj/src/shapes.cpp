// SPDX-License-Identifier: Apache-2.0

#include "rhs/shapes.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace rhs::shapes {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// "(a,b,...)" -> integers
std::vector<std::size_t> parse_tuple(std::string_view text, std::string_view what) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw DomainError("shape spec: expected parenthesised " + std::string(what));
  text = text.substr(1, text.size() - 2);
  std::vector<std::size_t> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    std::size_t value = 0;
    const auto *end = item.data() + item.size();
    const auto res = std::from_chars(item.data(), end, value);
    if (item.empty() || res.ec != std::errc{} || res.ptr != end)
      throw DomainError("shape spec: bad integer '" + std::string(item) + "' in " +
                        std::string(what));
    out.push_back(value);
    if (comma == std::string_view::npos)
      break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

const char *kind_name(ShapeSpec::Kind kind) {
  switch (kind) {
  case ShapeSpec::Kind::rectangle:
    return "rectangle";
  case ShapeSpec::Kind::strip_row:
    return "strip_row";
  case ShapeSpec::Kind::strip_col:
    return "strip_col";
  case ShapeSpec::Kind::circle:
    return "circle";
  }
  return "?";
}

// Per-(s,k) element-wise terms conj(g) .* conj(theta) eta^-1/2 .* (H_s w_k);
// the effective scalar for a mask is the masked sum of one such vector.
std::vector<std::vector<CVec>> gain_terms(const channel::ChannelSet &channels,
                                          const PhaseConfig &phases,
                                          const Precoder &precoder) {
  const std::size_t S = channels.surfaces(), K = channels.users();
  if (phases.surfaces() != S || phases.elements() != channels.m_elems)
    throw DomainError("select_shape: phase configuration does not match channels");
  if (precoder.users() != K || precoder.antennas() != channels.n_tr)
    throw DomainError("select_shape: precoder does not match channels");
  const double scale = 1.0 / std::sqrt(phases.eta);
  std::vector<std::vector<CVec>> terms(S);
  for (std::size_t s = 0; s < S; ++s) {
    const CMat hw = channels.h_ap_rhs[s] * precoder.w; // M x K
    for (std::size_t k = 0; k < K; ++k)
      terms[s].push_back(scale * (channels.g_rhs_ue[s][k].conjugate().array() *
                                  phases.theta[s].conjugate().array() *
                                  hw.col(static_cast<Eigen::Index>(k)).array())
                                     .matrix());
  }
  return terms;
}

double masked_power(const ShapeMask &mask, const CVec &term) {
  Complex acc = 0.0;
  for (std::size_t m = 0; m < mask.elements(); ++m)
    if (mask.active[m])
      acc += term[static_cast<Eigen::Index>(m)];
  return std::norm(acc);
}

void check_grid(const ShapeMask &mask, std::size_t elements) {
  if (mask.elements() != elements)
    throw DomainError("mask '" + mask.label + "' has " + std::to_string(mask.elements()) +
                      " elements, channels have " + std::to_string(elements));
}

} // namespace

ShapeSpec ShapeSpec::parse(std::string_view text) {
  text = trim(text);
  const auto open = text.find('(');
  if (open == std::string_view::npos)
    throw DomainError("shape spec: missing '(' in '" + std::string(text) + "'");
  const auto name = trim(text.substr(0, open));
  const auto close = text.find(')', open);
  if (close == std::string_view::npos)
    throw DomainError("shape spec: missing ')' in '" + std::string(text) + "'");

  ShapeSpec spec;
  if (name == "rectangle")
    spec.kind = Kind::rectangle;
  else if (name == "strip_row")
    spec.kind = Kind::strip_row;
  else if (name == "strip_col")
    spec.kind = Kind::strip_col;
  else if (name == "circle")
    spec.kind = Kind::circle;
  else
    throw DomainError("shape spec: unknown shape kind '" + std::string(name) + "'");

  const auto params = parse_tuple(text.substr(open, close - open + 1), "shape parameters");
  const std::size_t expected = spec.kind == Kind::rectangle ? 2 : 1;
  if (params.size() != expected)
    throw DomainError("shape spec: " + std::string(name) + " takes " +
                      std::to_string(expected) + " parameter(s)");
  spec.a = params[0];
  spec.b = expected == 2 ? params[1] : 1;
  if (spec.kind != Kind::circle && (spec.a == 0 || spec.b == 0))
    throw DomainError("shape spec: " + std::string(name) + " sizes must be >= 1");

  auto rest = trim(text.substr(close + 1));
  if (!rest.empty()) {
    if (rest.front() != '@')
      throw DomainError("shape spec: unexpected trailing text '" + std::string(rest) + "'");
    const auto anchor = parse_tuple(rest.substr(1), "anchor");
    if (anchor.size() != 2)
      throw DomainError("shape spec: anchor takes (row,col)");
    spec.anchor = {anchor[0], anchor[1]};
  }
  return spec;
}

std::string ShapeSpec::to_string() const {
  std::string out = kind_name(kind);
  out += "(" + std::to_string(a);
  if (kind == Kind::rectangle)
    out += "," + std::to_string(b);
  out += ")@(" + std::to_string(anchor.row) + "," + std::to_string(anchor.col) + ")";
  return out;
}

std::size_t ShapeMask::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), std::uint8_t{1}));
}

ShapeMask ShapeMask::full(Grid grid, std::string label) {
  return {grid, std::vector<std::uint8_t>(grid.size(), 1), std::move(label)};
}

ShapeMask ShapeMask::empty(Grid grid, std::string label) {
  return {grid, std::vector<std::uint8_t>(grid.size(), 0), std::move(label)};
}

ShapeMask make_mask(const ShapeSpec &spec, Grid grid, std::string label) {
  if (grid.rows == 0 || grid.cols == 0)
    throw DomainError("make_mask: empty grid");

  std::size_t height = 0, width = 0;
  switch (spec.kind) {
  case ShapeSpec::Kind::rectangle:
    width = spec.a;
    height = spec.b;
    break;
  case ShapeSpec::Kind::strip_row:
    width = spec.a;
    height = 1;
    break;
  case ShapeSpec::Kind::strip_col:
    width = 1;
    height = spec.a;
    break;
  case ShapeSpec::Kind::circle:
    width = height = 2 * spec.a + 1;
    break;
  }
  if (width == 0 || height == 0)
    throw DomainError("make_mask: shape must cover at least one element");
  if (spec.anchor.row + height > grid.rows || spec.anchor.col + width > grid.cols)
    throw DomainError("make_mask: " + spec.to_string() + " does not fit a " +
                      std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + " grid");

  ShapeMask mask = ShapeMask::empty(grid, label.empty() ? spec.to_string() : std::move(label));
  const auto r0 = static_cast<long>(spec.a);
  for (std::size_t dr = 0; dr < height; ++dr)
    for (std::size_t dc = 0; dc < width; ++dc) {
      if (spec.kind == ShapeSpec::Kind::circle) {
        const long y = static_cast<long>(dr) - r0, x = static_cast<long>(dc) - r0;
        if (x * x + y * y > r0 * r0)
          continue;
      }
      mask.active[(spec.anchor.row + dr) * grid.cols + spec.anchor.col + dc] = 1;
    }
  return mask;
}

ShapeCatalog::ShapeCatalog(std::vector<ShapeMask> masks) : masks_(std::move(masks)) {
  if (masks_.empty())
    throw DomainError("shape catalog must not be empty");
  std::set<std::string> labels;
  for (const auto &m : masks_) {
    if (!(m.grid == masks_.front().grid) || m.elements() != m.grid.size())
      throw DomainError("shape catalog: masks must share one grid");
    if (!labels.insert(m.label).second)
      throw DomainError("shape catalog: duplicate label '" + m.label + "'");
  }
}

CVec apply_mask(const ShapeMask &mask, const CVec &theta_s, double eta) {
  if (static_cast<std::size_t>(theta_s.size()) != mask.elements())
    throw DomainError("apply_mask: phase vector length does not match mask");
  const double scale = 1.0 / std::sqrt(eta);
  CVec out(theta_s.size());
  for (Eigen::Index m = 0; m < theta_s.size(); ++m)
    out[m] = mask.active[static_cast<std::size_t>(m)] ? scale * std::conj(theta_s[m])
                                                      : Complex(0.0);
  return out;
}

double effective_gain(const channel::ChannelSet &channels, MaskView masks,
                      const PhaseConfig &phases, const Precoder &precoder) {
  const auto terms = gain_terms(channels, phases, precoder);
  double total = 0.0;
  for (std::size_t s = 0; s < terms.size(); ++s) {
    check_grid(masks[s], channels.m_elems);
    for (const auto &t : terms[s])
      total += masked_power(masks[s], t);
  }
  return total;
}

Selection select_shape(const ShapeCatalog &catalog, const channel::ChannelSet &channels,
                       const PhaseConfig &phases, const Precoder &precoder) {
  if (catalog.empty())
    throw DomainError("select_shape: empty catalog");
  const auto terms = gain_terms(channels, phases, precoder);
  Selection best;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const ShapeMask &mask = catalog[i];
    check_grid(mask, channels.m_elems);
    double gain = 0.0;
    for (const auto &per_user : terms)
      for (const auto &t : per_user)
        gain += masked_power(mask, t);
    if (i == 0 || gain > best.gain)
      best = {i, &mask, gain};
  }
  return best;
}

std::vector<std::size_t> select_shape_per_surface(const ShapeCatalog &catalog,
                                                  const channel::ChannelSet &channels,
                                                  const PhaseConfig &phases,
                                                  const Precoder &precoder) {
  if (catalog.empty())
    throw DomainError("select_shape: empty catalog");
  const auto terms = gain_terms(channels, phases, precoder);
  std::vector<std::size_t> out(terms.size(), 0);
  for (std::size_t s = 0; s < terms.size(); ++s) {
    double best = -1.0;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      check_grid(catalog[i], channels.m_elems);
      double gain = 0.0;
      for (const auto &t : terms[s])
        gain += masked_power(catalog[i], t);
      if (gain > best) {
        best = gain;
        out[s] = i;
      }
    }
  }
  return out;
}

} // namespace rhs::shapes
