#include "oldroyd/assembly.hpp"

#include <stdexcept>
#include <string>

namespace oldroyd {

int default_assembly_degree(const FeSpace& velocity) {
  return velocity.kind() == SpaceKind::VelocityMini ? 8 : 5;
}

bool compatible_pair(const FeSpace& velocity, const FeSpace& pressure) {
  return (velocity.kind() == SpaceKind::VelocityP2 && pressure.kind() == SpaceKind::PressureP0) ||
         (velocity.kind() == SpaceKind::VelocityMini && pressure.kind() == SpaceKind::PressureP1);
}

ElementCache::ElementCache(const FeSpace& space, int quadrature_degree)
    : space_(&space),
      rule_(&quadrature_rule(quadrature_degree)),
      nd_(space.dofs_per_cell()),
      nq_(rule_->size()) {
  const Mesh& mesh = space.mesh();
  const ReferenceElement& el = space.element();
  const std::size_t nc = mesh.num_cells();

  values_.resize(nq_ * nd_);
  std::vector<Vec2> ref_grads(nq_ * nd_);
  for (std::size_t q = 0; q < nq_; ++q) {
    el.eval(rule_->xi(q), rule_->eta(q), std::span<double>(values_.data() + q * nd_, nd_));
    el.grad(rule_->xi(q), rule_->eta(q), std::span<Vec2>(ref_grads.data() + q * nd_, nd_));
  }

  weights_.resize(nc * nq_);
  points_.resize(nc * nq_);
  grads_.resize(nc * nq_ * nd_);
  for (std::size_t c = 0; c < nc; ++c) {
    const CellGeometry g = mesh.cell_geometry(c);
    const Eigen::Matrix2d jit = g.inverse_jacobian.transpose();
    for (std::size_t q = 0; q < nq_; ++q) {
      weights_[c * nq_ + q] = rule_->weights[q] * 2.0 * g.area;
      points_[c * nq_ + q] = g.map(rule_->xi(q), rule_->eta(q));
      for (int i = 0; i < nd_; ++i) {
        const Vec2& r = ref_grads[q * nd_ + i];
        grads_[(c * nq_ + q) * nd_ + i] = {jit(0, 0) * r[0] + jit(0, 1) * r[1],
                                           jit(1, 0) * r[0] + jit(1, 1) * r[1]};
      }
    }
  }
}

double ElementCache::eval(std::span<const double> coeffs, int component, std::size_t cell,
                          std::size_t q) const {
  const auto dofs = space_->cell_dofs(cell);
  double v = 0.0;
  for (int i = 0; i < nd_; ++i) {
    v += coeffs[space_->vector_dof(component, dofs[i])] * value(q, i);
  }
  return v;
}

Vec2 ElementCache::eval_grad(std::span<const double> coeffs, int component, std::size_t cell,
                             std::size_t q) const {
  const auto dofs = space_->cell_dofs(cell);
  Vec2 g{0.0, 0.0};
  for (int i = 0; i < nd_; ++i) {
    const double c = coeffs[space_->vector_dof(component, dofs[i])];
    const Vec2& gi = grad(cell, q, i);
    g[0] += c * gi[0];
    g[1] += c * gi[1];
  }
  return g;
}

namespace {

void require_velocity(const FeSpace& space, const char* who) {
  if (!space.is_velocity()) {
    throw std::invalid_argument(std::string(who) + ": expected a velocity space, got " +
                                std::string(to_string(space.kind())));
  }
}

// Block-diagonal vector pattern plus the value slot of every local pair.
SparseMatrix build_velocity_pattern(const FeSpace& space, std::vector<long>& slots) {
  const std::size_t nc = space.mesh().num_cells();
  const int nd = space.dofs_per_cell();
  std::vector<Triplet> t;
  t.reserve(nc * nd * nd * 2);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto dofs = space.cell_dofs(c);
    for (int comp = 0; comp < 2; ++comp) {
      for (int a = 0; a < nd; ++a) {
        for (int b = 0; b < nd; ++b) {
          t.push_back({static_cast<int>(space.vector_dof(comp, dofs[a])),
                       static_cast<int>(space.vector_dof(comp, dofs[b])), 0.0});
        }
      }
    }
  }
  SparseMatrix pattern = SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), std::move(t));
  slots.assign(nc * nd * nd * 2, -1);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto dofs = space.cell_dofs(c);
    for (int a = 0; a < nd; ++a) {
      for (int b = 0; b < nd; ++b) {
        for (int comp = 0; comp < 2; ++comp) {
          slots[((c * nd + a) * nd + b) * 2 + comp] =
              pattern.find(space.vector_dof(comp, dofs[a]), space.vector_dof(comp, dofs[b]));
        }
      }
    }
  }
  return pattern;
}

// Adds a scalar local matrix to both component blocks.
void scatter_local(const std::vector<long>& slots, int nd, std::size_t cell,
                   std::span<const double> local, SparseMatrix& m) {
  auto& v = m.values();
  const long* s = slots.data() + cell * nd * nd * 2;
  for (int ab = 0; ab < nd * nd; ++ab) {
    v[static_cast<std::size_t>(s[2 * ab])] += local[ab];
    v[static_cast<std::size_t>(s[2 * ab + 1])] += local[ab];
  }
}

template <typename Kernel>
void assemble_velocity(const ElementCache& cache, const std::vector<long>& slots,
                       SparseMatrix& out, Kernel&& kernel) {
  const int nd = cache.dofs_per_cell();
  std::vector<double> local(static_cast<std::size_t>(nd * nd));
  const std::size_t nc = cache.space().mesh().num_cells();
  for (std::size_t c = 0; c < nc; ++c) {
    std::fill(local.begin(), local.end(), 0.0);
    kernel(c, std::span<double>(local));
    scatter_local(slots, nd, c, local, out);
  }
}

void mass_kernel(const ElementCache& cache, std::size_t c, std::span<double> local) {
  const int nd = cache.dofs_per_cell();
  for (std::size_t q = 0; q < cache.num_points(); ++q) {
    const double w = cache.weight(c, q);
    for (int a = 0; a < nd; ++a) {
      const double va = w * cache.value(q, a);
      for (int b = 0; b < nd; ++b) local[a * nd + b] += va * cache.value(q, b);
    }
  }
}

void stiffness_kernel(const ElementCache& cache, std::size_t c, std::span<double> local) {
  const int nd = cache.dofs_per_cell();
  for (std::size_t q = 0; q < cache.num_points(); ++q) {
    const double w = cache.weight(c, q);
    for (int a = 0; a < nd; ++a) {
      const Vec2& ga = cache.grad(c, q, a);
      for (int b = 0; b < nd; ++b) {
        const Vec2& gb = cache.grad(c, q, b);
        local[a * nd + b] += w * (ga[0] * gb[0] + ga[1] * gb[1]);
      }
    }
  }
}

// n_ab = 1/2 (w.grad psi_b, psi_a) - 1/2 (w.grad psi_a, psi_b)
void convection_kernel(const ElementCache& cache, std::span<const double> w, std::size_t c,
                       std::span<double> local) {
  const int nd = cache.dofs_per_cell();
  std::array<double, ReferenceElement::kMaxDofs> adv{};
  for (std::size_t q = 0; q < cache.num_points(); ++q) {
    const double wq = cache.weight(c, q);
    const double w0 = cache.eval(w, 0, c, q);
    const double w1 = cache.eval(w, 1, c, q);
    for (int a = 0; a < nd; ++a) {
      const Vec2& g = cache.grad(c, q, a);
      adv[a] = w0 * g[0] + w1 * g[1];
    }
    for (int a = 0; a < nd; ++a) {
      const double va = cache.value(q, a);
      for (int b = 0; b < nd; ++b) {
        local[a * nd + b] += 0.5 * wq * (adv[b] * va - adv[a] * cache.value(q, b));
      }
    }
  }
}

SparseMatrix divergence_matrix(const ElementCache& vcache, const ElementCache& pcache) {
  const FeSpace& vs = vcache.space();
  const FeSpace& ps = pcache.space();
  const int nv = vcache.dofs_per_cell();
  const int np = pcache.dofs_per_cell();
  const std::size_t nc = vs.mesh().num_cells();
  std::vector<Triplet> t;
  t.reserve(nc * nv * np * 2);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto vd = vs.cell_dofs(c);
    const auto pd = ps.cell_dofs(c);
    for (int i = 0; i < np; ++i) {
      for (int s = 0; s < nv; ++s) {
        double dx = 0.0;
        double dy = 0.0;
        for (std::size_t q = 0; q < vcache.num_points(); ++q) {
          const double wq = vcache.weight(c, q) * pcache.value(q, i);
          dx += wq * vcache.grad(c, q, s)[0];
          dy += wq * vcache.grad(c, q, s)[1];
        }
        t.push_back({pd[i], static_cast<int>(vs.vector_dof(0, vd[s])), dx});
        t.push_back({pd[i], static_cast<int>(vs.vector_dof(1, vd[s])), dy});
      }
    }
  }
  return SparseMatrix::from_triplets(ps.num_dofs(), vs.num_dofs(), std::move(t));
}

SparseMatrix scalar_mass_matrix(const ElementCache& cache) {
  const FeSpace& s = cache.space();
  const int nd = cache.dofs_per_cell();
  std::vector<Triplet> t;
  for (std::size_t c = 0; c < s.mesh().num_cells(); ++c) {
    const auto dofs = s.cell_dofs(c);
    for (int a = 0; a < nd; ++a) {
      for (int b = 0; b < nd; ++b) {
        double v = 0.0;
        for (std::size_t q = 0; q < cache.num_points(); ++q) {
          v += cache.weight(c, q) * cache.value(q, a) * cache.value(q, b);
        }
        t.push_back({dofs[a], dofs[b], v});
      }
    }
  }
  return SparseMatrix::from_triplets(s.num_dofs(), s.num_dofs(), std::move(t));
}

Vector basis_integrals(const ElementCache& cache) {
  const FeSpace& s = cache.space();
  Vector w(s.num_dofs(), 0.0);
  for (std::size_t c = 0; c < s.mesh().num_cells(); ++c) {
    const auto dofs = s.cell_dofs(c);
    for (int a = 0; a < cache.dofs_per_cell(); ++a) {
      for (std::size_t q = 0; q < cache.num_points(); ++q) {
        w[dofs[a]] += cache.weight(c, q) * cache.value(q, a);
      }
    }
  }
  return w;
}

Vector load_vector(const ElementCache& cache, const VectorField& f, double t) {
  const FeSpace& s = cache.space();
  const int nd = cache.dofs_per_cell();
  Vector out(s.num_dofs(), 0.0);
  for (std::size_t c = 0; c < s.mesh().num_cells(); ++c) {
    const auto dofs = s.cell_dofs(c);
    for (std::size_t q = 0; q < cache.num_points(); ++q) {
      const Point2& p = cache.point(c, q);
      const Vec2 fv = f(p.x, p.y, t);
      const double w = cache.weight(c, q);
      for (int a = 0; a < nd; ++a) {
        const double v = w * cache.value(q, a);
        out[s.vector_dof(0, dofs[a])] += v * fv[0];
        out[s.vector_dof(1, dofs[a])] += v * fv[1];
      }
    }
  }
  return out;
}

}  // namespace

OperatorSet::OperatorSet(const FeSpace& velocity, const FeSpace& pressure)
    : OperatorSet(velocity, pressure, default_assembly_degree(velocity)) {}

OperatorSet::OperatorSet(const FeSpace& velocity, const FeSpace& pressure, int quadrature_degree)
    : velocity_(&velocity),
      pressure_(&pressure),
      cache_(velocity, quadrature_degree),
      load_cache_(velocity, kForcingDegree) {
  require_velocity(velocity, "OperatorSet");
  if (!compatible_pair(velocity, pressure)) {
    throw std::invalid_argument("OperatorSet: incompatible pair " +
                                std::string(to_string(velocity.kind())) + " / " +
                                std::string(to_string(pressure.kind())));
  }
  pattern_ = build_velocity_pattern(velocity, slots_);
  mass_ = pattern_;
  assemble_velocity(cache_, slots_, mass_,
                    [this](std::size_t c, std::span<double> l) { mass_kernel(cache_, c, l); });
  stiffness_ = pattern_;
  assemble_velocity(cache_, slots_, stiffness_,
                    [this](std::size_t c, std::span<double> l) { stiffness_kernel(cache_, c, l); });
  const ElementCache pcache(pressure, quadrature_degree);
  divergence_ = divergence_matrix(cache_, pcache);
  pressure_mass_ = scalar_mass_matrix(pcache);
  pressure_weights_ = basis_integrals(pcache);
}

SparseMatrix OperatorSet::convection(std::span<const double> w) const {
  SparseMatrix out = pattern_;
  convection_into(w, out);
  return out;
}

void OperatorSet::convection_into(std::span<const double> w, SparseMatrix& out) const {
  if (w.size() != velocity_->num_dofs()) {
    throw std::invalid_argument("convection: coefficient vector has " + std::to_string(w.size()) +
                                " entries, space has " + std::to_string(velocity_->num_dofs()));
  }
  if (!out.same_pattern(pattern_)) {
    throw std::invalid_argument("convection_into: output does not carry the velocity pattern");
  }
  out.set_zero();
  assemble_velocity(cache_, slots_, out, [this, w](std::size_t c, std::span<double> l) {
    convection_kernel(cache_, w, c, l);
  });
}

Vector OperatorSet::load(const VectorField& f, double t) const {
  return load_vector(load_cache_, f, t);
}

SparseMatrix assemble_mass(const FeSpace& velocity) {
  require_velocity(velocity, "assemble_mass");
  std::vector<long> slots;
  SparseMatrix m = build_velocity_pattern(velocity, slots);
  const ElementCache cache(velocity, default_assembly_degree(velocity));
  assemble_velocity(cache, slots, m,
                    [&cache](std::size_t c, std::span<double> l) { mass_kernel(cache, c, l); });
  return m;
}

SparseMatrix assemble_stiffness(const FeSpace& velocity) {
  require_velocity(velocity, "assemble_stiffness");
  std::vector<long> slots;
  SparseMatrix m = build_velocity_pattern(velocity, slots);
  const ElementCache cache(velocity, default_assembly_degree(velocity));
  assemble_velocity(cache, slots, m, [&cache](std::size_t c, std::span<double> l) {
    stiffness_kernel(cache, c, l);
  });
  return m;
}

SparseMatrix assemble_divergence(const FeSpace& velocity, const FeSpace& pressure) {
  require_velocity(velocity, "assemble_divergence");
  if (!compatible_pair(velocity, pressure)) {
    throw std::invalid_argument("assemble_divergence: incompatible pair " +
                                std::string(to_string(velocity.kind())) + " / " +
                                std::string(to_string(pressure.kind())));
  }
  const int degree = default_assembly_degree(velocity);
  return divergence_matrix(ElementCache(velocity, degree), ElementCache(pressure, degree));
}

SparseMatrix assemble_convection(const FeSpace& velocity, std::span<const double> w) {
  require_velocity(velocity, "assemble_convection");
  if (w.size() != velocity.num_dofs()) {
    throw std::invalid_argument("assemble_convection: coefficient size mismatch");
  }
  std::vector<long> slots;
  SparseMatrix m = build_velocity_pattern(velocity, slots);
  const ElementCache cache(velocity, default_assembly_degree(velocity));
  assemble_velocity(cache, slots, m, [&cache, w](std::size_t c, std::span<double> l) {
    convection_kernel(cache, w, c, l);
  });
  return m;
}

Vector assemble_load(const FeSpace& velocity, const VectorField& f, double t) {
  require_velocity(velocity, "assemble_load");
  return load_vector(ElementCache(velocity, kForcingDegree), f, t);
}

SparseMatrix assemble_pressure_mass(const FeSpace& pressure) {
  return scalar_mass_matrix(ElementCache(pressure, 2));
}

Vector pressure_mean_weights(const FeSpace& pressure) {
  return basis_integrals(ElementCache(pressure, 2));
}

}  // namespace oldroyd
