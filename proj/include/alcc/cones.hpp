#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "alcc/common.hpp"
#include "alcc/linalg.hpp"

namespace alcc {

/// Closed convex cone: {0}, nonnegative orthant, second-order cone (scalar t
/// first), PSD cone in scaled-svec coordinates, the whole space (arises as the
/// dual of {0}), or a Cartesian product. Products are flattened on
/// construction; block offsets are precomputed.
class Cone {
 public:
  enum class Kind { Zero, NonNeg, SecondOrder, Psd, Free, Product };

  static Cone zero(std::size_t m) { return Cone(Kind::Zero, m, 0); }
  static Cone nonneg(std::size_t m) { return Cone(Kind::NonNeg, m, 0); }
  /// Second-order cone of ambient dimension m: {(t, x) in R x R^{m-1} : ||x|| <= t}.
  static Cone second_order(std::size_t m) {
    if (m < 1) throw DimensionError("Cone::second_order: ambient dim >= 1");
    return Cone(Kind::SecondOrder, m, 0);
  }
  /// PSD cone of d x d symmetric matrices; ambient dimension d(d+1)/2 (svec).
  static Cone psd(std::size_t d) { return Cone(Kind::Psd, SymMatrix::svec_len(d), d); }
  static Cone free(std::size_t m) { return Cone(Kind::Free, m, 0); }

  static Cone product(std::vector<Cone> parts) {
    Cone c(Kind::Product, 0, 0);
    for (auto& p : parts) {
      if (p.kind_ == Kind::Product) {  // flatten nested products
        for (auto& q : p.parts_) c.push_part(std::move(q));
      } else {
        c.push_part(std::move(p));
      }
    }
    return c;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  /// Matrix side length d for PSD cones, 0 otherwise.
  std::size_t psd_side() const { return psd_side_; }
  const std::vector<Cone>& parts() const { return parts_; }

  /// Euclidean projection onto the cone.
  Vector project(const Vector& v) const {
    if (v.size() != dim_) throw DimensionError("Cone::project: dim " + std::to_string(v.size()) +
                                               " vs ambient " + std::to_string(dim_));
    switch (kind_) {
      case Kind::Zero:
        return zeros(dim_);
      case Kind::Free:
        return v;
      case Kind::NonNeg: {
        Vector r(v);
        for (auto& x : r) x = std::max(x, 0.0);
        return r;
      }
      case Kind::SecondOrder:
        return project_soc(v);
      case Kind::Psd:
        return project_psd(v);
      case Kind::Product: {
        Vector r(dim_);
        for (std::size_t b = 0; b < parts_.size(); ++b) {
          Vector block(v.begin() + static_cast<std::ptrdiff_t>(offsets_[b]),
                       v.begin() + static_cast<std::ptrdiff_t>(offsets_[b] + parts_[b].dim_));
          Vector pb = parts_[b].project(block);
          std::copy(pb.begin(), pb.end(), r.begin() + static_cast<std::ptrdiff_t>(offsets_[b]));
        }
        return r;
      }
    }
    throw Error("Cone::project: unreachable");
  }

  /// Euclidean distance to the cone, ||v - project(v)||_2.
  double distance(const Vector& v) const { return norm2(sub(v, project(v))); }

  /// Structural dual cone.
  Cone dual() const {
    switch (kind_) {
      case Kind::Zero:        return free(dim_);
      case Kind::Free:        return zero(dim_);
      case Kind::NonNeg:      return nonneg(dim_);       // self-dual
      case Kind::SecondOrder: return second_order(dim_); // self-dual
      case Kind::Psd:         return psd(psd_side_);     // self-dual
      case Kind::Product: {
        std::vector<Cone> duals;
        duals.reserve(parts_.size());
        for (const auto& p : parts_) duals.push_back(p.dual());
        return product(std::move(duals));
      }
    }
    throw Error("Cone::dual: unreachable");
  }

  /// Membership test in the dual cone: distance(K*, y) <= tol.
  bool in_dual(const Vector& y, double tol) const {
    if (tol < 0.0) throw InvalidParameter("Cone::in_dual: tol must be >= 0");
    return dual().distance(y) <= tol;
  }

  bool contains(const Vector& v, double tol) const { return distance(v) <= tol; }

  std::string describe() const {
    switch (kind_) {
      case Kind::Zero:        return "zero(" + std::to_string(dim_) + ")";
      case Kind::Free:        return "free(" + std::to_string(dim_) + ")";
      case Kind::NonNeg:      return "nonneg(" + std::to_string(dim_) + ")";
      case Kind::SecondOrder: return "soc(" + std::to_string(dim_) + ")";
      case Kind::Psd:         return "psd(" + std::to_string(psd_side_) + ")";
      case Kind::Product: {
        std::string s = "product(";
        for (std::size_t i = 0; i < parts_.size(); ++i)
          s += (i ? "," : "") + parts_[i].describe();
        return s + ")";
      }
    }
    return "?";
  }

 private:
  Cone(Kind k, std::size_t dim, std::size_t psd_side) : kind_(k), dim_(dim), psd_side_(psd_side) {}

  void push_part(Cone p) {
    offsets_.push_back(dim_);
    dim_ += p.dim_;
    parts_.push_back(std::move(p));
  }

  Vector project_soc(const Vector& v) const {
    const double t = v[0];
    double nx = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) nx += v[i] * v[i];
    nx = std::sqrt(nx);
    if (nx <= t) return v;                 // already in the cone
    Vector r(v.size(), 0.0);
    if (nx <= -t) return r;                // in the polar cone -K*
    const double a = 0.5 * (t + nx);
    r[0] = a;
    const double s = a / nx;
    for (std::size_t i = 1; i < v.size(); ++i) r[i] = s * v[i];
    return r;
  }

  Vector project_psd(const Vector& v) const {
    const std::size_t d = psd_side_;
    EigResult eig = sym_eig(SymMatrix(d, v));
    // Reconstruct V * max(Lambda,0) * V^T; eigenvalues clipped at exactly 0.
    Vector full(d * d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const double lam = eig.eigenvalues[k];
      if (lam <= 0.0) continue;
      for (std::size_t i = 0; i < d; ++i) {
        const double vik = eig.eigenvectors(i, k) * lam;
        for (std::size_t j = 0; j < d; ++j) full[i * d + j] += vik * eig.eigenvectors(j, k);
      }
    }
    return SymMatrix::from_full(d, full).svec;
  }

  Kind kind_;
  std::size_t dim_;
  std::size_t psd_side_;
  std::vector<Cone> parts_;
  std::vector<std::size_t> offsets_;
};

/// A point paired with the cone it lives against; validates the ambient
/// dimension on construction.
struct ConePoint {
  const Cone* cone = nullptr;
  Vector coords;

  ConePoint(const Cone& c, Vector v) : cone(&c), coords(std::move(v)) {
    if (coords.size() != c.dim())
      throw DimensionError("ConePoint: coords length vs cone ambient dimension");
  }

  bool in_cone(double tol) const { return cone->contains(coords, tol); }
  double distance() const { return cone->distance(coords); }
};

}  // namespace alcc
