// SPDX-License-Identifier: Apache-2.0
//
// Binary activation masks over a surface's element grid, the catalog of
// admissible shapes, and exhaustive shape selection by effective channel gain.

#pragma once

#include "rhs/channel.hpp"
#include "rhs/state.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace rhs::shapes {

struct Grid {
  std::size_t rows = 0; // M_x
  std::size_t cols = 0; // M_y

  std::size_t size() const { return rows * cols; }
  bool operator==(const Grid &) const = default;
};

struct Anchor {
  std::size_t row = 0;
  std::size_t col = 0;
};

/// rectangle(w, h): w columns by h rows. strip_row(n): n cells along a row.
/// strip_col(n): n cells down a column. circle(r): cells within Euclidean
/// distance r of the center of a (2r+1)-square bounding box. The anchor is the
/// top-left corner of the shape's bounding box.
struct ShapeSpec {
  enum class Kind { rectangle, strip_row, strip_col, circle };

  Kind kind = Kind::rectangle;
  std::size_t a = 1;
  std::size_t b = 1;
  Anchor anchor{};

  /// Parses "rectangle(10,6)@(0,0)", "strip_row(60)", "circle(2)@(1,1)".
  /// The "@(row,col)" suffix is optional and defaults to (0,0).
  static ShapeSpec parse(std::string_view text);
  std::string to_string() const;
};

struct ShapeMask {
  Grid grid;
  std::vector<std::uint8_t> active; // row-major, length M
  std::string label;

  std::size_t elements() const { return active.size(); }
  std::size_t active_count() const;
  bool is_active(std::size_t m) const { return active[m] != 0; }

  static ShapeMask full(Grid grid, std::string label = "full");
  static ShapeMask empty(Grid grid, std::string label = "empty");
};

ShapeMask make_mask(const ShapeSpec &spec, Grid grid, std::string label = {});

/// Non-owning view of the masks in effect: one mask shared by every surface,
/// or one mask per surface.
class MaskView {
public:
  MaskView(const ShapeMask &shared) : masks_(&shared, 1) {}
  MaskView(std::span<const ShapeMask> per_surface) : masks_(per_surface) {}
  MaskView(const std::vector<ShapeMask> &per_surface) : masks_(per_surface) {}

  const ShapeMask &operator[](std::size_t s) const {
    return masks_.size() == 1 ? masks_[0] : masks_[s];
  }
  bool shared() const { return masks_.size() == 1; }
  std::size_t size() const { return masks_.size(); }

private:
  std::span<const ShapeMask> masks_;
};

class ShapeCatalog {
public:
  ShapeCatalog() = default;
  explicit ShapeCatalog(std::vector<ShapeMask> masks);

  const std::vector<ShapeMask> &masks() const { return masks_; }
  const ShapeMask &operator[](std::size_t i) const { return masks_.at(i); }
  std::size_t size() const { return masks_.size(); }
  bool empty() const { return masks_.empty(); }
  Grid grid() const { return masks_.front().grid; }

private:
  std::vector<ShapeMask> masks_;
};

/// active_m * conj(theta_m) * eta^(-1/2), i.e. the diagonal of (A o Phi_s^H).
CVec apply_mask(const ShapeMask &mask, const CVec &theta_s, double eta = 1.0);

/// |g_{s,k}^H (A o Phi_s^H) H_s w_k|^2 summed over surfaces and users.
double effective_gain(const channel::ChannelSet &channels, MaskView masks,
                      const PhaseConfig &phases, const Precoder &precoder);

struct Selection {
  std::size_t index = 0;
  const ShapeMask *mask = nullptr;
  double gain = 0.0;
};

/// Exhaustive argmax of the summed squared effective gains over the catalog,
/// with one mask shared by all surfaces. Ties go to the lowest index.
Selection select_shape(const ShapeCatalog &catalog, const channel::ChannelSet &channels,
                       const PhaseConfig &phases, const Precoder &precoder);

/// Per-surface variant: the objective separates over surfaces, so each surface
/// takes its own argmax. Returns one index per surface.
std::vector<std::size_t> select_shape_per_surface(const ShapeCatalog &catalog,
                                                  const channel::ChannelSet &channels,
                                                  const PhaseConfig &phases,
                                                  const Precoder &precoder);

} // namespace rhs::shapes
